#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hidescan/network.hpp"

namespace hidescan {

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  std::uint64_t seed = 0;
  /// Stop after this many consecutive epochs without a new best validation loss; 0 disables.
  int early_stop_patience = 6;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

template <typename T>
struct Dataset {
  Tensor<T> inputs;  // N x sample shape
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
};

/// Rows `indices` of `data`, in order.
template <typename T>
Dataset<T> subset(const Dataset<T>& data, const std::vector<std::size_t>& indices);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  double train_accuracy = 0;  // percent, measured on the training-mode forward passes
  bool has_validation = false;
  double val_loss = 0;
  double val_accuracy = 0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;  // epoch whose weights were kept
  bool stopped_early = false;
};

/// Optional per-epoch observer, e.g. for progress output.
using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch SGD with momentum on the network's head loss. Samples are reshuffled each epoch
/// from (cfg.seed, epoch). With a validation set and patience > 0 training stops once validation
/// loss has not improved for `early_stop_patience` epochs and the best weights are restored.
/// Throws ShapeMismatch on input/label inconsistencies and NonFiniteLossError on divergence.
template <typename T>
TrainResult train(Network<T>& net, const Dataset<T>& train_set, const Dataset<T>& val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Mean loss and accuracy (percent) in inference mode.
template <typename T>
std::pair<double, double> evaluate_loss_accuracy(const Network<T>& net, const Dataset<T>& data, int batch_size = 64);

}  // namespace hidescan
