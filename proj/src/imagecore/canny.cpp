#include "hidescan/canny.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hidescan/error.hpp"

namespace hidescan {

void CannyParams::validate() const {
  if (!(low >= 0.0 && low < high && high <= 1.0))
    throw Error(ErrorCode::InvalidThreshold,
                "need 0 <= low < high <= 1, got [" + std::to_string(low) + ", " + std::to_string(high) + "]");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidThreshold, "sigma must be positive");
}

namespace {

std::vector<double> gaussian_taps(double sigma, int radius) {
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
  }
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

// Clamped index table covering [-pad, len + pad).
std::vector<int> clamped_indices(int len, int pad) {
  std::vector<int> idx(len + 2 * pad);
  for (int i = -pad; i < len + pad; ++i) idx[i + pad] = std::clamp(i, 0, len - 1);
  return idx;
}

enum Direction : std::uint8_t { kHorizontal, kDiagonalDown, kVertical, kDiagonalUp };

}  // namespace

EdgeMap canny(const Image& gray, const CannyParams& params) {
  if (gray.channels() != 1)
    throw Error(ErrorCode::ChannelMismatch, "canny needs a 1-channel image, got " + std::to_string(gray.channels()));
  params.validate();

  const int h = gray.height();
  const int w = gray.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  const int radius = static_cast<int>(std::ceil(3.0 * params.sigma));
  const auto taps = gaussian_taps(params.sigma, radius);

  // Blur, horizontal then vertical.
  std::vector<double> tmp(n), blur(n);
  {
    const auto cx = clamped_indices(w, radius);
    auto src = gray.data();
    for (int r = 0; r < h; ++r) {
      const std::uint8_t* row = src.data() + static_cast<std::size_t>(r) * w;
      double* out = tmp.data() + static_cast<std::size_t>(r) * w;
      for (int c = 0; c < w; ++c) {
        const int* ix = cx.data() + c;
        double acc = 0.0;
        for (int k = 0; k <= 2 * radius; ++k) acc += taps[k] * row[ix[k]];
        out[c] = acc;
      }
    }
    const auto cy = clamped_indices(h, radius);
    for (int r = 0; r < h; ++r) {
      const int* iy = cy.data() + r;
      double* out = blur.data() + static_cast<std::size_t>(r) * w;
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = 0; k <= 2 * radius; ++k) acc += taps[k] * tmp[static_cast<std::size_t>(iy[k]) * w + c];
        out[c] = acc;
      }
    }
  }

  // Sobel gradients, magnitude and quantized direction.
  std::vector<double> mag(n);
  std::vector<std::uint8_t> dir(n);
  double max_mag = 0.0;
  {
    const double tan22 = std::tan(M_PI / 8.0);
    const double tan67 = std::tan(3.0 * M_PI / 8.0);
    for (int r = 0; r < h; ++r) {
      const double* up = blur.data() + static_cast<std::size_t>(std::max(r - 1, 0)) * w;
      const double* mid = blur.data() + static_cast<std::size_t>(r) * w;
      const double* down = blur.data() + static_cast<std::size_t>(std::min(r + 1, h - 1)) * w;
      for (int c = 0; c < w; ++c) {
        const int cl = std::max(c - 1, 0);
        const int cr = std::min(c + 1, w - 1);
        const double gx = (up[cr] - up[cl]) + 2.0 * (mid[cr] - mid[cl]) + (down[cr] - down[cl]);
        const double gy = (down[cl] - up[cl]) + 2.0 * (down[c] - up[c]) + (down[cr] - up[cr]);
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        mag[i] = std::sqrt(gx * gx + gy * gy);
        max_mag = std::max(max_mag, mag[i]);
        const double ax = std::fabs(gx);
        const double ay = std::fabs(gy);
        if (ay < ax * tan22) dir[i] = kHorizontal;
        else if (ay >= ax * tan67) dir[i] = kVertical;
        else dir[i] = ((gx > 0) == (gy > 0)) ? kDiagonalDown : kDiagonalUp;
      }
    }
  }

  EdgeMap edges(h, w);
  if (max_mag == 0.0) return edges;

  // Non-maximum suppression and classification: 0 none, 1 weak, 2 strong.
  const double low_t = params.low * max_mag;
  const double high_t = params.high * max_mag;
  auto mag_at = [&](int r, int c) {
    return (r < 0 || r >= h || c < 0 || c >= w) ? 0.0 : mag[static_cast<std::size_t>(r) * w + c];
  };
  static constexpr int kOffsets[4][2][2] = {
      {{0, -1}, {0, 1}},    // horizontal gradient: left/right
      {{-1, -1}, {1, 1}},   // gx, gy same sign
      {{-1, 0}, {1, 0}},    // vertical gradient: up/down
      {{-1, 1}, {1, -1}},   // gx, gy opposite sign
  };
  std::vector<std::uint8_t> cls(n, 0);
  std::vector<std::size_t> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      const double m = mag[i];
      if (m <= 0.0 || m < low_t) continue;
      const auto& off = kOffsets[dir[i]];
      if (m < mag_at(r + off[0][0], c + off[0][1]) || m < mag_at(r + off[1][0], c + off[1][1])) continue;
      if (m >= high_t) {
        cls[i] = 2;
        stack.push_back(i);
      } else {
        cls[i] = 1;
      }
    }
  }

  // Hysteresis by flood fill from strong pixels.
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int r = static_cast<int>(i / w);
    const int c = static_cast<int>(i % w);
    edges.set(r, c, true);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
        const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
        if (cls[j] == 1) {
          cls[j] = 2;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace hidescan
