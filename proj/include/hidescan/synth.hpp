#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "hidescan/dataset.hpp"
#include "hidescan/features.hpp"
#include "hidescan/image.hpp"

namespace hidescan {

/// Procedural leather-like texture with dark blob ("fly bite") defects.
struct SynthParams {
  int size = 200;
  BrightnessClass base_brightness = BrightnessClass::Bright;
  double grain_scale = 32.0;                        // wrinkle spacing, pixels
  int defect_count = 1;
  std::array<double, 2> defect_radius{8.0, 16.0};  // [min, max] semi-axis, pixels
  int defect_contrast = 120;                        // intensity drop inside a defect
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

struct SynthSample {
  Image image;  // RGB
  Image base;   // the same texture before defects were stamped
  Image mask;   // 1-channel, 255 inside defects
};

/// Renders image `index`; each index draws from its own stream derived from (seed, index).
SynthSample render_synthetic(const SynthParams& params, std::size_t index, bool defective);

/// Writes `<out>/defective/*.png`, `<out>/non_defective/*.png`, `<out>/masks/*.png` and
/// `<out>/manifest.csv`. Defective images take indices [0, n_defective), the rest follow.
/// `threads` > 1 renders in parallel without changing any output byte.
DatasetManifest generate_synthetic(const SynthParams& params, int n_defective, int n_nondefective,
                                   const std::filesystem::path& out_dir, int threads = 1);

}  // namespace hidescan
