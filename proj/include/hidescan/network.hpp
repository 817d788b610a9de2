#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hidescan/layers.hpp"
#include "hidescan/network_spec.hpp"

namespace hidescan {

/// Loss attached to the network head: SoftmaxOutput trains with categorical cross-entropy,
/// a single-unit Sigmoid head with binary cross-entropy.
enum class LossKind { SoftmaxCrossEntropy, BinaryCrossEntropy };

template <typename T>
class Network {
 public:
  /// Builds the layers and draws initial weights from `seed`.
  Network(NetworkSpec spec, std::uint64_t seed);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return seed_; }
  LossKind loss_kind() const noexcept { return loss_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }
  const Shape& output_shape() const { return layers_.back()->output_shape(); }

  /// Training-path forward over a batch; activations stay cached for backward().
  const Tensor<T>& forward(const Tensor<T>& batch, bool training);

  /// Mean loss of the last forward() against `labels`, and parameter gradients of that loss.
  double backward(std::span<const int> labels);

  /// Mean loss of the last forward() without touching gradients.
  double loss(std::span<const int> labels) const;

  /// Read-only forward; safe to call concurrently.
  Tensor<T> infer(const Tensor<T>& batch) const;

  /// Probability of class 1 per sample, evaluated in chunks of `batch_size`.
  std::vector<double> predict_scores(const Tensor<T>& inputs, int batch_size = 64) const;

  std::vector<Param<T>> params();
  std::size_t parameter_count() const;

  /// Flat copy of all parameters in layer order (weights before biases).
  std::vector<T> flat_parameters() const;
  void set_flat_parameters(std::span<const T> values);

 private:
  double loss_from(const Tensor<T>& out, const Tensor<T>& head_input, std::span<const int> labels) const;
  void check_labels(std::span<const int> labels, int batch) const;

  NetworkSpec spec_;
  std::uint64_t seed_;
  LossKind loss_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<Tensor<T>> acts_;  // acts_[0] is the input, acts_[i + 1] the output of layer i
  std::vector<Tensor<T>> grads_;
};

/// Predicted class under the 0.5 decision threshold on the class-1 probability.
inline int decide(double score) { return score >= 0.5 ? 1 : 0; }

extern template class Network<float>;
extern template class Network<double>;

}  // namespace hidescan
