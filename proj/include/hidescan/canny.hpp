#pragma once

#include <cmath>

#include "hidescan/image.hpp"

namespace hidescan {

/// Double thresholds are fractions of the per-image maximum gradient magnitude.
struct CannyParams {
  double low = 0.5;
  double high = 0.9;
  double sigma = std::sqrt(2.0);

  /// Throws InvalidThreshold unless 0 <= low < high <= 1 and sigma > 0.
  void validate() const;
};

/// Canny edge detector on a single-channel image.
///
/// The arithmetic is pinned so that independent implementations agree bit for bit:
///  1. Separable Gaussian blur in double precision, radius ceil(3 sigma), replicate border.
///     Taps w[k] = exp(-k^2 / (2 sigma^2)) / sum, summed k = -r..r; horizontal pass first.
///  2. Sobel with replicate border:
///       gx = (b[r-1][c+1] - b[r-1][c-1]) + 2 (b[r][c+1] - b[r][c-1]) + (b[r+1][c+1] - b[r+1][c-1])
///     and gy likewise with rows and columns exchanged.
///  3. Magnitude sqrt(gx^2 + gy^2).
///  4. Non-maximum suppression along the gradient direction quantized to 0/45/90/135 degrees
///     (y axis points down). A pixel survives if its magnitude is positive and >= both
///     neighbours; neighbours outside the image count as 0.
///  5. Strong: survivor with magnitude >= high * max; weak: >= low * max.
///  6. Hysteresis keeps weak pixels 8-connected (transitively) to a strong pixel.
EdgeMap canny(const Image& gray, const CannyParams& params = {});

}  // namespace hidescan
