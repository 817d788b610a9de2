#include "hidescan/network.hpp"

#include <cmath>

namespace hidescan {

namespace {

LossKind head_loss(const NetworkSpec& spec, const Shape& out) {
  if (spec.layers.empty()) throw Error(ErrorCode::InvalidTopology, "network has no layers");
  const auto kind = spec.layers.back().kind;
  if (kind == LayerKind::SoftmaxOutput) return LossKind::SoftmaxCrossEntropy;
  if (kind == LayerKind::Sigmoid && shape_size(out) == 1) return LossKind::BinaryCrossEntropy;
  throw Error(ErrorCode::InvalidTopology, "network must end in a softmax or a single sigmoid unit");
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

template <typename T>
Network<T>::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
  const auto shapes = infer_shapes(spec_);
  loss_ = head_loss(spec_, shapes.back());
  Shape in = spec_.input_shape;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    layers_.push_back(make_layer<T>(spec_.layers[i], in, derive_seed(seed, 1000 + i)));
    in = shapes[i];
  }
  Rng init(derive_seed(seed, 0));
  for (auto& layer : layers_) layer->initialize(init);
  acts_.resize(layers_.size() + 1);
  grads_.resize(layers_.size() + 1);
}

template <typename T>
const Tensor<T>& Network<T>::forward(const Tensor<T>& batch, bool training) {
  acts_[0] = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->forward(acts_[i], acts_[i + 1], training);
  return acts_.back();
}

template <typename T>
void Network<T>::check_labels(std::span<const int> labels, int batch) const {
  if (static_cast<int>(labels.size()) != batch)
    throw Error(ErrorCode::ShapeMismatch, "got " + std::to_string(labels.size()) + " labels for a batch of " +
                                              std::to_string(batch));
  const int classes = loss_ == LossKind::SoftmaxCrossEntropy ? static_cast<int>(shape_size(output_shape())) : 2;
  for (int l : labels)
    if (l < 0 || l >= classes) throw Error(ErrorCode::ShapeMismatch, "label " + std::to_string(l) + " out of range");
}

template <typename T>
double Network<T>::loss_from(const Tensor<T>& out, const Tensor<T>& head_input, std::span<const int> labels) const {
  const int n = out.dim(0);
  check_labels(labels, n);
  double total = 0.0;
  if (loss_ == LossKind::SoftmaxCrossEntropy) {
    total = softmax_cross_entropy(head_input, labels) * n;
  } else {
    for (int r = 0; r < n; ++r) {
      const double z = head_input[r];
      total += softplus(z) - (labels[r] == 1 ? z : 0.0);
    }
  }
  return total / n;
}

template <typename T>
double Network<T>::loss(std::span<const int> labels) const {
  Tensor<T> logits = acts_[acts_.size() - 2];
  logits.reshape({acts_.back().dim(0), static_cast<int>(logits.size() / acts_.back().dim(0))});
  return loss_from(acts_.back(), logits, labels);
}

template <typename T>
double Network<T>::backward(std::span<const int> labels) {
  const Tensor<T>& out = acts_.back();
  const int n = out.dim(0);
  const double value = loss(labels);

  // The head's own Jacobian folds into the loss gradient: d/dz = (p - y) / n.
  const std::size_t head = layers_.size() - 1;
  Tensor<T>& dz = grads_[head];
  dz.resize(acts_[head].shape());
  const int k = static_cast<int>(out.size() / n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < k; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * k + c;
      const T target = loss_ == LossKind::SoftmaxCrossEntropy ? T(labels[r] == c) : T(labels[r]);
      dz[i] = (out[i] - target) / static_cast<T>(n);
    }
  }
  for (std::size_t i = head; i-- > 0;) {
    layers_[i]->backward(acts_[i], acts_[i + 1], grads_[i + 1], i == 0 ? nullptr : &grads_[i]);
  }
  return value;
}

template <typename T>
Tensor<T> Network<T>::infer(const Tensor<T>& batch) const {
  Tensor<T> a = batch, b;
  for (const auto& layer : layers_) {
    layer->infer(a, b);
    std::swap(a, b);
  }
  return a;
}

template <typename T>
std::vector<double> Network<T>::predict_scores(const Tensor<T>& inputs, int batch_size) const {
  const int n = inputs.dim(0);
  const std::size_t sample = inputs.size() / n;
  std::vector<double> scores;
  scores.reserve(n);
  for (int start = 0; start < n; start += batch_size) {
    const int count = std::min(batch_size, n - start);
    Shape s = inputs.shape();
    s[0] = count;
    Tensor<T> chunk(s, std::vector<T>(inputs.ptr() + start * sample, inputs.ptr() + (start + count) * sample));
    const Tensor<T> out = infer(chunk);
    const int k = static_cast<int>(out.size() / count);
    for (int r = 0; r < count; ++r) scores.push_back(static_cast<double>(out[static_cast<std::size_t>(r) * k + k - 1]));
  }
  return scores;
}

template <typename T>
std::vector<Param<T>> Network<T>::params() {
  std::vector<Param<T>> all;
  for (auto& layer : layers_) {
    auto p = layer->params();
    all.insert(all.end(), p.begin(), p.end());
  }
  return all;
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
  return hidescan::parameter_count(spec_);
}

template <typename T>
std::vector<T> Network<T>::flat_parameters() const {
  std::vector<T> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (const auto& p : layer->params()) flat.insert(flat.end(), p.value->data().begin(), p.value->data().end());
  }
  return flat;
}

template <typename T>
void Network<T>::set_flat_parameters(std::span<const T> values) {
  if (values.size() != parameter_count())
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(parameter_count()) + " parameters, got " +
                                              std::to_string(values.size()));
  std::size_t o = 0;
  for (auto& p : params()) {
    std::copy(values.begin() + o, values.begin() + o + p.value->size(), p.value->data().begin());
    o += p.value->size();
  }
}

template class Network<float>;
template class Network<double>;

}  // namespace hidescan
