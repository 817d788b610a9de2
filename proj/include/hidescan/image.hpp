#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hidescan {

/// 8-bit raster, row-major and channel-interleaved. Channels are 1 (gray) or 3 (RGB).
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, std::uint8_t fill = 0);
  Image(int height, int width, int channels, std::vector<std::uint8_t> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(int row, int col, int ch = 0) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }
  std::uint8_t& at(int row, int col, int ch = 0) {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Binary edge map: every element is 0 or 255.
class EdgeMap {
 public:
  EdgeMap() = default;
  EdgeMap(int height, int width);
  /// Validates that every value is 0 or 255 (NonBinaryInput otherwise).
  EdgeMap(int height, int width, std::vector<std::uint8_t> data);
  /// Accepts a single-channel image whose pixels are all 0 or 255.
  static EdgeMap from_image(const Image& img);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::uint8_t at(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  void set(int row, int col, bool edge) {
    data_[static_cast<std::size_t>(row) * width_ + col] = edge ? 255 : 0;
  }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::size_t edge_count() const;

  Image to_image() const;

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Round half up, then clamp into [0, 255].
std::uint8_t round_to_u8(double v);

/// Weighted luminance 0.2989 R + 0.5870 G + 0.1140 B per pixel.
Image to_grayscale(const Image& img);

/// Copies a gray image into three identical channels.
Image replicate_channels(const Image& gray);

/// Bilinear resize with pixel-center alignment. Source coordinates are
/// (dst + 0.5) * (src_len / dst_len) - 0.5, clamped to the image.
Image resize(const Image& img, int out_height, int out_width);

}  // namespace hidescan
