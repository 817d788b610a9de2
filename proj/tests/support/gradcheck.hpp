#pragma once

// Central-difference gradient checking shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include "hidescan/layers.hpp"
#include "hidescan/random.hpp"

namespace gradcheck {

inline constexpr double kStep = 1e-5;
inline constexpr double kTol = 1e-4;
inline constexpr int kTrials = 20;

hidescan::Tensor<double> random_tensor(hidescan::Shape shape, hidescan::Rng& rng, double lo = -1.0, double hi = 1.0);
double dot(const hidescan::Tensor<double>& a, const hidescan::Tensor<double>& b);
double rel_err(double analytic, double numeric);

/// Worst relative error of dx and every parameter gradient of `layer`, using sum(r * y) for random r.
double layer_gradient_error(hidescan::Layer<double>& layer, hidescan::Tensor<double> x, hidescan::Rng& rng);

struct Case {
  std::string label;
  hidescan::LayerSpec spec;
  hidescan::Shape sample_shape;
  int batch = 2;
  double lo = -1.0, hi = 1.0;
};

/// One case per layer kind, with the awkward variants (groups, strides, padding) covered.
std::vector<Case> layer_cases();

/// Worst error of each of `trials` freshly initialized layers on random inputs.
std::vector<double> case_errors(const Case& c, int trials = kTrials);

}  // namespace gradcheck
