#pragma once

#include <array>
#include <string>
#include <vector>

#include "hidescan/tensor.hpp"

namespace hidescan {

enum class LayerKind { Conv, ReLU, LRN, MaxPool, FullyConnected, Dropout, SoftmaxOutput, Sigmoid };

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// Declarative layer description. Fields irrelevant to a kind are ignored.
struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  std::string name;
  std::array<int, 2> kernel{1, 1};        // conv / pool window, rows x cols
  int filters = 0;                        // conv output channels, FC output units
  std::array<int, 2> stride{1, 1};        // [sy, sx]
  std::array<int, 4> padding{0, 0, 0, 0};  // [top, bottom, left, right]
  int groups = 1;                         // conv
  int window = 5;                         // LRN channels
  double lrn_k = 2.0;
  double lrn_alpha = 1e-4;
  double lrn_beta = 0.75;
  double rate = 0.0;  // dropout probability

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

LayerSpec conv_layer(std::string name, int kernel, int filters, int stride, int pad, int groups = 1);
LayerSpec pool_layer(std::string name, int kernel, int stride, int pad);
LayerSpec fc_layer(std::string name, int outputs);
LayerSpec lrn_layer(std::string name, int window = 5);
LayerSpec dropout_layer(std::string name, double rate);
LayerSpec activation_layer(std::string name, LayerKind kind);

/// Per-sample input shape: {H, W, C} for image networks, {F} for feature networks.
struct NetworkSpec {
  Shape input_shape;
  std::vector<LayerSpec> layers;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Output size along one axis: floor((in + pad_a + pad_b - kernel) / stride) + 1.
int conv_output_length(int in, int kernel, int stride, int pad_a, int pad_b);

/// Output shape of one layer for a per-sample input shape; throws ShapeMismatch.
Shape layer_output_shape(const LayerSpec& layer, const Shape& input);

/// Output shape after every layer, in order. Throws ShapeMismatch on the first inconsistency.
std::vector<Shape> infer_shapes(const NetworkSpec& spec);

/// Number of weights and biases of one layer given its input shape.
std::size_t layer_parameter_count(const LayerSpec& layer, const Shape& input);
std::size_t parameter_count(const NetworkSpec& spec);

/// Feature-vector classifier: inputs -> hidden (sigmoid) -> 1 (sigmoid). Throws InvalidTopology.
NetworkSpec build_ann(int hidden, int inputs = 50);

inline constexpr std::array<int, 4> kAlexNetResolutions{50, 100, 150, 200};

/// AlexNet with two-way grouping on conv2/4/5, re-sized input and a 2-way softmax head.
/// Throws UnsupportedResolution unless resolution is 50, 100, 150 or 200.
NetworkSpec build_modified_alexnet(int resolution);

}  // namespace hidescan
