#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hidescan/image.hpp"

namespace hidescan {

struct BlockGrid {
  int rows = 5;
  int cols = 5;
};

struct FeatureVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

enum class BrightnessClass { Bright, Dark };

std::string_view to_string(BrightnessClass b);

/// Splits the map into rows*cols equal tiles in row-major order.
/// Throws IndivisibleDimensions unless both dimensions divide evenly.
std::vector<EdgeMap> block_partition(const EdgeMap& map, const BlockGrid& grid);

/// Per block (row-major): (count of 0-pixels, count of 255-pixels). With `normalize` the counts
/// are divided by the block area, so each pair sums to 1.
FeatureVector block_frequency_features(const EdgeMap& map, const BlockGrid& grid, bool normalize = true);

/// Same, for a raw single-channel image; throws NonBinaryInput if any pixel is not 0 or 255.
FeatureVector block_frequency_features(const Image& binary, const BlockGrid& grid, bool normalize = true);

struct BrightnessRule {
  int intensity = 125;     // a pixel is bright when strictly above this
  double fraction = 0.70;  // an image is bright when strictly more than this share is bright
};

/// 3-channel inputs are converted to grayscale first.
BrightnessClass brightness_category(const Image& img, const BrightnessRule& rule = {});

/// One CSV row per image: id,label,f0,...,fN-1.
struct FeatureRow {
  std::string id;
  int label = 0;
  FeatureVector features;
};

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(std::istream& in);

}  // namespace hidescan
