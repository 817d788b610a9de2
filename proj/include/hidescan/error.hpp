#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hidescan {

enum class ErrorCode {
  ChannelMismatch,
  InvalidDimension,
  InvalidThreshold,
  IndivisibleDimensions,
  NonBinaryInput,
  ShapeMismatch,
  InvalidTopology,
  UnsupportedResolution,
  NonFiniteLoss,
  TooFewSamples,
  InsufficientPool,
  InvalidK,
  EmptyDataset,
  UnreadableImage,
  LengthMismatch,
  EmptyMatrix,
  SingleClass,
  UnsupportedVersion,
  InvalidArgument,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Training diverged; carries the (1-based) epoch in which the loss stopped being finite.
class NonFiniteLossError : public Error {
 public:
  explicit NonFiniteLossError(int epoch)
      : Error(ErrorCode::NonFiniteLoss, "loss became non-finite in epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class InsufficientPoolError : public Error {
 public:
  InsufficientPoolError(std::size_t needed, std::size_t available)
      : Error(ErrorCode::InsufficientPool,
              "need " + std::to_string(needed) + " non-defective samples, pool has " +
                  std::to_string(available) + " (short by " + std::to_string(needed - available) + ")"),
        shortfall_(needed - available) {}
  std::size_t shortfall() const noexcept { return shortfall_; }

 private:
  std::size_t shortfall_;
};

}  // namespace hidescan
