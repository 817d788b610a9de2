#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <cstdint>
#include <vector>

#include "hidescan/canny.hpp"
#include "hidescan/image.hpp"
#include "hidescan/network_spec.hpp"
#include "hidescan/tensor.hpp"

namespace oracle {

using Grid = std::vector<std::vector<double>>;

/// Canny written from the textbook description with 2D arrays, atan2 angles and
/// repeated hysteresis sweeps.
std::vector<std::vector<int>> canny(const hidescan::Image& gray, const hidescan::CannyParams& p);

/// Bilinear resize with the half-pixel-centre convention, one pixel at a time.
hidescan::Image resize(const hidescan::Image& img, int height, int width);

/// Per-block (zeros, ones) counts by direct enumeration of every pixel.
std::vector<double> block_counts(const std::vector<std::vector<int>>& edges, int rows, int cols, bool normalize);

/// AUC as the Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie).
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Direct-loop convolution of one NHWC batch; weights [kh][kw][cin/groups][cout].
hidescan::Tensor<double> conv2d(const hidescan::Tensor<double>& x, const hidescan::LayerSpec& spec,
                                const hidescan::Tensor<double>& w, const hidescan::Tensor<double>& b);

hidescan::Tensor<double> maxpool(const hidescan::Tensor<double>& x, const hidescan::LayerSpec& spec);

hidescan::Tensor<double> lrn(const hidescan::Tensor<double>& x, const hidescan::LayerSpec& spec);

/// Output side length of an AlexNet-style stack, applying floor((n + pads - k) / s) + 1 by hand.
int alexnet_pool5_side(int resolution);

}  // namespace oracle
