#include "hidescan/network_spec.hpp"

#include <algorithm>

namespace hidescan {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::ReLU: return "relu";
    case LayerKind::LRN: return "lrn";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::FullyConnected: return "fc";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::SoftmaxOutput: return "softmax";
    case LayerKind::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (LayerKind k : {LayerKind::Conv, LayerKind::ReLU, LayerKind::LRN, LayerKind::MaxPool,
                      LayerKind::FullyConnected, LayerKind::Dropout, LayerKind::SoftmaxOutput, LayerKind::Sigmoid}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown layer kind '" + std::string(name) + "'");
}

LayerSpec conv_layer(std::string name, int kernel, int filters, int stride, int pad, int groups) {
  LayerSpec s;
  s.kind = LayerKind::Conv;
  s.name = std::move(name);
  s.kernel = {kernel, kernel};
  s.filters = filters;
  s.stride = {stride, stride};
  s.padding = {pad, pad, pad, pad};
  s.groups = groups;
  return s;
}

LayerSpec pool_layer(std::string name, int kernel, int stride, int pad) {
  LayerSpec s;
  s.kind = LayerKind::MaxPool;
  s.name = std::move(name);
  s.kernel = {kernel, kernel};
  s.stride = {stride, stride};
  s.padding = {pad, pad, pad, pad};
  return s;
}

LayerSpec fc_layer(std::string name, int outputs) {
  LayerSpec s;
  s.kind = LayerKind::FullyConnected;
  s.name = std::move(name);
  s.filters = outputs;
  return s;
}

LayerSpec lrn_layer(std::string name, int window) {
  LayerSpec s;
  s.kind = LayerKind::LRN;
  s.name = std::move(name);
  s.window = window;
  return s;
}

LayerSpec dropout_layer(std::string name, double rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.name = std::move(name);
  s.rate = rate;
  return s;
}

LayerSpec activation_layer(std::string name, LayerKind kind) {
  LayerSpec s;
  s.kind = kind;
  s.name = std::move(name);
  return s;
}

int conv_output_length(int in, int kernel, int stride, int pad_a, int pad_b) {
  const int span = in + pad_a + pad_b - kernel;
  if (span < 0) return 0;
  return span / stride + 1;
}

namespace {

[[noreturn]] void mismatch(const LayerSpec& layer, const Shape& input, const std::string& why) {
  throw Error(ErrorCode::ShapeMismatch,
              "layer '" + layer.name + "' (" + std::string(to_string(layer.kind)) + ") on input " +
                  shape_string(input) + ": " + why);
}

void check_window(const LayerSpec& layer, const Shape& input) {
  if (input.size() != 3) mismatch(layer, input, "expects an H x W x C input");
  if (layer.kernel[0] < 1 || layer.kernel[1] < 1) mismatch(layer, input, "kernel must be positive");
  if (layer.stride[0] < 1 || layer.stride[1] < 1) mismatch(layer, input, "stride entries must be >= 1");
  for (int p : layer.padding)
    if (p < 0) mismatch(layer, input, "padding must be >= 0");
}

}  // namespace

Shape layer_output_shape(const LayerSpec& layer, const Shape& input) {
  if (input.empty()) mismatch(layer, input, "empty input shape");
  for (int d : input)
    if (d < 1) mismatch(layer, input, "non-positive dimension");
  switch (layer.kind) {
    case LayerKind::Conv:
    case LayerKind::MaxPool: {
      check_window(layer, input);
      const auto& p = layer.padding;
      const int oh = conv_output_length(input[0], layer.kernel[0], layer.stride[0], p[0], p[1]);
      const int ow = conv_output_length(input[1], layer.kernel[1], layer.stride[1], p[2], p[3]);
      if (oh < 1 || ow < 1) mismatch(layer, input, "window exceeds the padded input");
      if (layer.kind == LayerKind::MaxPool) {
        if (p[0] >= layer.kernel[0] || p[1] >= layer.kernel[0] || p[2] >= layer.kernel[1] || p[3] >= layer.kernel[1])
          mismatch(layer, input, "pool padding must be smaller than the window");
        return {oh, ow, input[2]};
      }
      if (layer.groups < 1 || input[2] % layer.groups != 0)
        mismatch(layer, input, "groups must divide the input channel count");
      if (layer.filters < 1 || layer.filters % layer.groups != 0)
        mismatch(layer, input, "groups must divide the filter count");
      return {oh, ow, layer.filters};
    }
    case LayerKind::LRN:
      if (input.size() != 3) mismatch(layer, input, "expects an H x W x C input");
      if (layer.window < 1 || layer.window % 2 == 0) mismatch(layer, input, "window must be odd");
      return input;
    case LayerKind::Dropout:
      if (!(layer.rate >= 0.0 && layer.rate < 1.0)) mismatch(layer, input, "rate must lie in [0, 1)");
      return input;
    case LayerKind::ReLU:
    case LayerKind::Sigmoid:
      return input;
    case LayerKind::FullyConnected:
      if (layer.filters < 1) mismatch(layer, input, "output count must be positive");
      return {layer.filters};
    case LayerKind::SoftmaxOutput:
      if (input.size() != 1) mismatch(layer, input, "expects a flat input");
      return input;
  }
  mismatch(layer, input, "unknown layer kind");
}

std::vector<Shape> infer_shapes(const NetworkSpec& spec) {
  std::vector<Shape> shapes;
  shapes.reserve(spec.layers.size());
  Shape current = spec.input_shape;
  for (const auto& layer : spec.layers) {
    current = layer_output_shape(layer, current);
    shapes.push_back(current);
  }
  return shapes;
}

std::size_t layer_parameter_count(const LayerSpec& layer, const Shape& input) {
  switch (layer.kind) {
    case LayerKind::Conv: {
      const std::size_t fan_in = static_cast<std::size_t>(layer.kernel[0]) * layer.kernel[1] * (input[2] / layer.groups);
      return fan_in * layer.filters + layer.filters;
    }
    case LayerKind::FullyConnected:
      return shape_size(input) * layer.filters + layer.filters;
    default:
      return 0;
  }
}

std::size_t parameter_count(const NetworkSpec& spec) {
  const auto shapes = infer_shapes(spec);
  std::size_t total = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i)
    total += layer_parameter_count(spec.layers[i], i == 0 ? spec.input_shape : shapes[i - 1]);
  return total;
}

NetworkSpec build_ann(int hidden, int inputs) {
  if (hidden < 1) throw Error(ErrorCode::InvalidTopology, "hidden layer needs at least one neuron");
  if (inputs < 1) throw Error(ErrorCode::InvalidTopology, "input layer needs at least one neuron");
  NetworkSpec spec;
  spec.input_shape = {inputs};
  spec.layers = {fc_layer("hidden", hidden), activation_layer("hidden_sigmoid", LayerKind::Sigmoid),
                 fc_layer("output", 1), activation_layer("output_sigmoid", LayerKind::Sigmoid)};
  return spec;
}

NetworkSpec build_modified_alexnet(int resolution) {
  if (std::find(kAlexNetResolutions.begin(), kAlexNetResolutions.end(), resolution) == kAlexNetResolutions.end())
    throw Error(ErrorCode::UnsupportedResolution,
                "resolution " + std::to_string(resolution) + " is not one of 50, 100, 150, 200");
  NetworkSpec spec;
  spec.input_shape = {resolution, resolution, 3};
  spec.layers = {
      conv_layer("conv1", 11, 96, 4, 0),
      activation_layer("relu1", LayerKind::ReLU),
      lrn_layer("norm1"),
      pool_layer("pool1", 3, 2, 0),
      conv_layer("conv2", 5, 256, 1, 2, 2),
      activation_layer("relu2", LayerKind::ReLU),
      lrn_layer("norm2"),
      pool_layer("pool2", 3, 2, 0),
      conv_layer("conv3", 3, 384, 1, 1),
      activation_layer("relu3", LayerKind::ReLU),
      conv_layer("conv4", 3, 384, 1, 1, 2),
      activation_layer("relu4", LayerKind::ReLU),
      conv_layer("conv5", 3, 256, 1, 1, 2),
      activation_layer("relu5", LayerKind::ReLU),
      pool_layer("pool5", 3, 2, 2),
      fc_layer("fc6", 4096),
      activation_layer("relu6", LayerKind::ReLU),
      dropout_layer("drop6", 0.5),
      fc_layer("fc7", 4096),
      activation_layer("relu7", LayerKind::ReLU),
      dropout_layer("drop7", 0.5),
      fc_layer("fc8", 2),
      activation_layer("output", LayerKind::SoftmaxOutput),
  };
  return spec;
}

}  // namespace hidescan
