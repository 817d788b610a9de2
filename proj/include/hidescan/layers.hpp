#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hidescan/network_spec.hpp"
#include "hidescan/random.hpp"
#include "hidescan/tensor.hpp"

namespace hidescan {

template <typename T>
struct Param {
  std::string name;
  Tensor<T>* value;
  Tensor<T>* grad;
};

/// A differentiable layer over batched tensors (batch dimension first, NHWC or NF after it).
template <typename T>
class Layer {
 public:
  Layer(LayerSpec spec, Shape input_shape);
  virtual ~Layer() = default;

  const LayerSpec& spec() const noexcept { return spec_; }
  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return output_shape_; }

  /// Caches what backward needs. Dropout draws a fresh mask when `training`.
  virtual void forward(const Tensor<T>& x, Tensor<T>& y, bool training) = 0;

  /// Stateless inference pass; safe to call concurrently on a shared layer.
  virtual void infer(const Tensor<T>& x, Tensor<T>& y) const = 0;

  /// Overwrites parameter gradients. `dx` may be null when the input gradient is not needed.
  /// `x` and `y` must be the tensors of the preceding forward call.
  virtual void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>* dx) = 0;

  virtual std::vector<Param<T>> params() { return {}; }

  /// Scaled-uniform (He fan-in) weights, zero biases.
  virtual void initialize(Rng&) {}

 protected:
  void check_input(const Tensor<T>& x) const;
  Shape batched(int n, const Shape& s) const;

  LayerSpec spec_;
  Shape input_shape_;
  Shape output_shape_;
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape, std::uint64_t seed);

/// Dropout exposes its mask so gradient checks can hold it fixed.
template <typename T>
class DropoutLayer final : public Layer<T> {
 public:
  DropoutLayer(LayerSpec spec, Shape input_shape, std::uint64_t seed);
  void forward(const Tensor<T>& x, Tensor<T>& y, bool training) override;
  void infer(const Tensor<T>& x, Tensor<T>& y) const override;
  void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>* dx) override;

  /// While frozen, training-mode forward reuses the previous mask instead of drawing a new one.
  void freeze_mask(bool frozen) { frozen_ = frozen; }
  std::span<const T> mask() const { return mask_; }

 private:
  Rng rng_;
  std::vector<T> mask_;
  bool frozen_ = false;
};

// Functional forms over a single sample (H x W x C or F) or a batch (leading N).

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const LayerSpec& spec, const Tensor<T>& weights, const Tensor<T>& bias);
template <typename T>
Tensor<T> maxpool(const Tensor<T>& x, const LayerSpec& spec);
template <typename T>
Tensor<T> lrn(const Tensor<T>& x, const LayerSpec& spec);
template <typename T>
Tensor<T> relu(const Tensor<T>& x);
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);
/// Affine map; weights are outputs x inputs, the input is flattened.
template <typename T>
Tensor<T> fully_connected(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& bias);
/// Softmax over the last dimension.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x);
/// Inverted dropout: keep with probability 1 - rate and scale by 1 / (1 - rate); identity when !training.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, Rng& rng, bool training);

/// Mean cross-entropy of softmax(logits) against class labels; logits are N x classes.
template <typename T>
double softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

}  // namespace hidescan
