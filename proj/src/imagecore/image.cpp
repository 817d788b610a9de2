#include "hidescan/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hidescan/error.hpp"

namespace hidescan {

namespace {

void check_dims(int height, int width, int channels) {
  if (height < 1 || width < 1)
    throw Error(ErrorCode::InvalidDimension,
                "image must be at least 1x1, got " + std::to_string(height) + "x" + std::to_string(width));
  if (channels != 1 && channels != 3)
    throw Error(ErrorCode::ChannelMismatch, "channels must be 1 or 3, got " + std::to_string(channels));
}

}  // namespace

Image::Image(int height, int width, int channels, std::uint8_t fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<std::uint8_t> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels)
    throw Error(ErrorCode::InvalidDimension, "pixel buffer length does not match height*width*channels");
}

EdgeMap::EdgeMap(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) throw Error(ErrorCode::InvalidDimension, "edge map must be at least 1x1");
  data_.assign(static_cast<std::size_t>(height) * width, 0);
}

EdgeMap::EdgeMap(int height, int width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 1 || width < 1) throw Error(ErrorCode::InvalidDimension, "edge map must be at least 1x1");
  if (data_.size() != static_cast<std::size_t>(height) * width)
    throw Error(ErrorCode::InvalidDimension, "edge buffer length does not match height*width");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] != 0 && data_[i] != 255)
      throw Error(ErrorCode::NonBinaryInput,
                  "value " + std::to_string(data_[i]) + " at index " + std::to_string(i) + " is not 0 or 255");
  }
}

EdgeMap EdgeMap::from_image(const Image& img) {
  if (img.channels() != 1) throw Error(ErrorCode::ChannelMismatch, "edge map source must be 1-channel");
  return EdgeMap(img.height(), img.width(), std::vector<std::uint8_t>(img.data().begin(), img.data().end()));
}

std::size_t EdgeMap::edge_count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{255}));
}

Image EdgeMap::to_image() const {
  return Image(height_, width_, 1, data_);
}

std::uint8_t round_to_u8(double v) {
  double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

Image to_grayscale(const Image& img) {
  if (img.channels() != 3)
    throw Error(ErrorCode::ChannelMismatch,
                "grayscale conversion needs 3 channels, got " + std::to_string(img.channels()));
  Image out(img.height(), img.width(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    double y = 0.2989 * src[3 * i] + 0.5870 * src[3 * i + 1] + 0.1140 * src[3 * i + 2];
    dst[i] = round_to_u8(y);
  }
  return out;
}

Image replicate_channels(const Image& gray) {
  if (gray.channels() != 1) throw Error(ErrorCode::ChannelMismatch, "replicate_channels needs 1 channel");
  Image out(gray.height(), gray.width(), 3);
  auto src = gray.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  return out;
}

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> bilinear_taps(int src_len, int dst_len) {
  std::vector<Tap> taps(dst_len);
  const double scale = static_cast<double>(src_len) / dst_len;
  for (int i = 0; i < dst_len; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
    int lo = static_cast<int>(std::floor(s));
    taps[i] = {lo, std::min(lo + 1, src_len - 1), s - lo};
  }
  return taps;
}

}  // namespace

Image resize(const Image& img, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1)
    throw Error(ErrorCode::InvalidDimension,
                "resize target must be at least 1x1, got " + std::to_string(out_height) + "x" +
                    std::to_string(out_width));
  const int ch = img.channels();
  Image out(out_height, out_width, ch);
  const auto rows = bilinear_taps(img.height(), out_height);
  const auto cols = bilinear_taps(img.width(), out_width);
  for (int r = 0; r < out_height; ++r) {
    const Tap& ty = rows[r];
    for (int c = 0; c < out_width; ++c) {
      const Tap& tx = cols[c];
      for (int k = 0; k < ch; ++k) {
        double top = (1.0 - tx.frac) * img.at(ty.lo, tx.lo, k) + tx.frac * img.at(ty.lo, tx.hi, k);
        double bottom = (1.0 - tx.frac) * img.at(ty.hi, tx.lo, k) + tx.frac * img.at(ty.hi, tx.hi, k);
        out.at(r, c, k) = round_to_u8((1.0 - ty.frac) * top + ty.frac * bottom);
      }
    }
  }
  return out;
}

}  // namespace hidescan
