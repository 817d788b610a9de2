#include "hidescan/error.hpp"

namespace hidescan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::IndivisibleDimensions: return "IndivisibleDimensions";
    case ErrorCode::NonBinaryInput: return "NonBinaryInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidTopology: return "InvalidTopology";
    case ErrorCode::UnsupportedResolution: return "UnsupportedResolution";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InsufficientPool: return "InsufficientPool";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace hidescan
