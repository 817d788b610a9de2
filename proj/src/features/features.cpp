#include "hidescan/features.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "hidescan/error.hpp"

namespace hidescan {

std::string_view to_string(BrightnessClass b) {
  return b == BrightnessClass::Bright ? "bright" : "dark";
}

namespace {

void check_grid(int height, int width, const BlockGrid& grid) {
  if (grid.rows < 1 || grid.cols < 1) throw Error(ErrorCode::InvalidDimension, "block grid must be at least 1x1");
  if (height % grid.rows != 0 || width % grid.cols != 0)
    throw Error(ErrorCode::IndivisibleDimensions,
                std::to_string(height) + "x" + std::to_string(width) + " does not divide into " +
                    std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " blocks");
}

}  // namespace

std::vector<EdgeMap> block_partition(const EdgeMap& map, const BlockGrid& grid) {
  check_grid(map.height(), map.width(), grid);
  const int bh = map.height() / grid.rows;
  const int bw = map.width() / grid.cols;
  std::vector<EdgeMap> blocks;
  blocks.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int br = 0; br < grid.rows; ++br) {
    for (int bc = 0; bc < grid.cols; ++bc) {
      EdgeMap block(bh, bw);
      for (int r = 0; r < bh; ++r)
        for (int c = 0; c < bw; ++c) block.set(r, c, map.at(br * bh + r, bc * bw + c) == 255);
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

FeatureVector block_frequency_features(const EdgeMap& map, const BlockGrid& grid, bool normalize) {
  check_grid(map.height(), map.width(), grid);
  const int bh = map.height() / grid.rows;
  const int bw = map.width() / grid.cols;
  const double area = static_cast<double>(bh) * bw;
  std::vector<std::size_t> edges(static_cast<std::size_t>(grid.rows) * grid.cols, 0);
  for (int r = 0; r < map.height(); ++r) {
    const std::size_t block_row = static_cast<std::size_t>(r / bh) * grid.cols;
    for (int c = 0; c < map.width(); ++c) {
      if (map.at(r, c) == 255) ++edges[block_row + c / bw];
    }
  }
  FeatureVector fv;
  fv.values.reserve(2 * edges.size());
  for (std::size_t e : edges) {
    const double ones = static_cast<double>(e);
    const double zeros = area - ones;
    fv.values.push_back(normalize ? zeros / area : zeros);
    fv.values.push_back(normalize ? ones / area : ones);
  }
  return fv;
}

FeatureVector block_frequency_features(const Image& binary, const BlockGrid& grid, bool normalize) {
  return block_frequency_features(EdgeMap::from_image(binary), grid, normalize);
}

BrightnessClass brightness_category(const Image& img, const BrightnessRule& rule) {
  const Image gray = img.channels() == 3 ? to_grayscale(img) : img;
  std::size_t bright = 0;
  for (std::uint8_t v : gray.data())
    if (v > rule.intensity) ++bright;
  const double share = static_cast<double>(bright) / static_cast<double>(gray.pixel_count());
  return share > rule.fraction ? BrightnessClass::Bright : BrightnessClass::Dark;
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  const std::size_t dims = rows.empty() ? 0 : rows.front().features.size();
  out << "id,label";
  for (std::size_t i = 0; i < dims; ++i) out << ",f" << i;
  out << '\n';
  char buf[32];
  for (const auto& row : rows) {
    if (row.features.size() != dims) throw Error(ErrorCode::LengthMismatch, "feature rows differ in length");
    out << row.id << ',' << row.label;
    for (double v : row.features.values) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

std::vector<FeatureRow> read_feature_csv(std::istream& in) {
  std::vector<FeatureRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    FeatureRow row;
    std::getline(ss, row.id, ',');
    std::getline(ss, cell, ',');
    row.label = std::stoi(cell);
    while (std::getline(ss, cell, ',')) row.features.values.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hidescan
