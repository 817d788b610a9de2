#include "hidescan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "hidescan/error.hpp"
#include "hidescan/image_io.hpp"
#include "hidescan/random.hpp"

namespace hidescan {

namespace fs = std::filesystem;

void SynthParams::validate() const {
  if (size < 16) throw Error(ErrorCode::InvalidArgument, "synthetic images must be at least 16 pixels wide");
  if (!(grain_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "grain_scale must be positive");
  if (defect_count < 0) throw Error(ErrorCode::InvalidArgument, "defect_count must be >= 0");
  if (!(defect_radius[0] > 0.0 && defect_radius[0] <= defect_radius[1]))
    throw Error(ErrorCode::InvalidArgument, "defect_radius must satisfy 0 < min <= max");
  if (2.0 * defect_radius[1] >= size) throw Error(ErrorCode::InvalidArgument, "defect_radius too large for image size");
  if (defect_contrast < 0 || defect_contrast > 255)
    throw Error(ErrorCode::InvalidArgument, "defect_contrast must lie in [0, 255]");
}

namespace {

double lattice(std::uint64_t key, int ix, int iy) {
  const std::uint64_t cell = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
                             static_cast<std::uint32_t>(iy);
  return static_cast<double>(derive_seed(key, cell) >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t key, double x, double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const int ix = static_cast<int>(fx0), iy = static_cast<int>(fy0);
  double tx = x - fx0, ty = y - fy0;
  tx = tx * tx * (3.0 - 2.0 * tx);
  ty = ty * ty * (3.0 - 2.0 * ty);
  const double a = lattice(key, ix, iy), b = lattice(key, ix + 1, iy);
  const double c = lattice(key, ix, iy + 1), d = lattice(key, ix + 1, iy + 1);
  return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
}

// Normalized to [0, 1].
double fbm(std::uint64_t key, double x, double y, int octaves) {
  double sum = 0.0, norm = 0.0, amp = 1.0, freq = 1.0;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * value_noise(derive_seed(key, o), x * freq, y * freq);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  return sum / norm;
}

struct Blob {
  double cx, cy, rx, ry, angle;
  double harmonic[3], phase[3];
};

// RGB tint whose luminance weights sum to ~1, so the gray value tracks the texture value.
constexpr double kTint[3] = {1.10, 0.97, 0.85};

}  // namespace

SynthSample render_synthetic(const SynthParams& params, std::size_t index, bool defective) {
  params.validate();
  const std::uint64_t stream = derive_seed(params.seed, index);
  Rng rng(derive_seed(stream, 0));
  const int n = params.size;
  const bool bright = params.base_brightness == BrightnessClass::Bright;
  const double mean = bright ? rng.uniform(180.0, 195.0) : rng.uniform(75.0, 90.0);
  const double amplitude = 30.0;
  const std::uint64_t grain_key = derive_seed(stream, 1);
  const std::uint64_t mottle_key = derive_seed(stream, 2);
  const double g = params.grain_scale;
  const double theta = rng.uniform(0.0, M_PI);
  const double ct = std::cos(theta), st = std::sin(theta);

  SynthSample out;
  out.base = Image(n, n, 3);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // Wrinkles: warped parallel ridges, continuous so their edges stay connected.
      const double u = (c * ct + r * st) / g + 1.5 * fbm(grain_key, c / (2.0 * g), r / (2.0 * g), 2);
      const double grain = 0.5 + 0.5 * std::sin(2.0 * M_PI * u);
      // Broad mottling so neighbouring hides differ in tone.
      const double mottle = fbm(mottle_key, c / (4.0 * g), r / (4.0 * g), 3);
      const double t = 0.85 * grain + 0.15 * mottle;
      const double v = mean + amplitude * (2.0 * t - 1.0);
      for (int k = 0; k < 3; ++k) out.base.at(r, c, k) = round_to_u8(v * kTint[k]);
    }
  }
  out.image = out.base;
  out.mask = Image(n, n, 1);
  if (!defective) return out;

  for (int d = 0; d < params.defect_count; ++d) {
    Blob b;
    const double rmax = params.defect_radius[1];
    b.rx = rng.uniform(params.defect_radius[0], params.defect_radius[1]);
    b.ry = rng.uniform(params.defect_radius[0], params.defect_radius[1]);
    b.cx = rng.uniform(rmax * 1.3, n - rmax * 1.3);
    b.cy = rng.uniform(rmax * 1.3, n - rmax * 1.3);
    b.angle = rng.uniform(0.0, M_PI);
    for (int h = 0; h < 3; ++h) {
      b.harmonic[h] = rng.uniform(0.0, 0.15);
      b.phase[h] = rng.uniform(0.0, 2.0 * M_PI);
    }
    const double ca = std::cos(b.angle), sa = std::sin(b.angle);
    const int reach = static_cast<int>(std::ceil(rmax * 1.3));
    const int r0 = std::max(0, static_cast<int>(b.cy) - reach), r1 = std::min(n - 1, static_cast<int>(b.cy) + reach);
    const int c0 = std::max(0, static_cast<int>(b.cx) - reach), c1 = std::min(n - 1, static_cast<int>(b.cx) + reach);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double dx = c + 0.5 - b.cx, dy = r + 0.5 - b.cy;
        const double u = (ca * dx + sa * dy) / b.rx;
        const double v = (-sa * dx + ca * dy) / b.ry;
        const double phi = std::atan2(v, u);
        double boundary = 1.0;
        for (int h = 0; h < 3; ++h) boundary += b.harmonic[h] * std::sin((h + 2) * phi + b.phase[h]);
        if (std::sqrt(u * u + v * v) < boundary) out.mask.at(r, c) = 255;
      }
    }
  }
  const auto mask = out.mask.data();
  auto px = out.image.data();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    for (int k = 0; k < 3; ++k) px[3 * i + k] = static_cast<std::uint8_t>(std::max(0, px[3 * i + k] - params.defect_contrast));
  }
  return out;
}

namespace {

std::string file_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%05zu", index);
  return buf;
}

}  // namespace

DatasetManifest generate_synthetic(const SynthParams& params, int n_defective, int n_nondefective,
                                   const fs::path& out_dir, int threads) {
  params.validate();
  if (n_defective < 0 || n_nondefective < 0) throw Error(ErrorCode::InvalidArgument, "sample counts must be >= 0");
  fs::create_directories(out_dir / "defective");
  fs::create_directories(out_dir / "non_defective");
  fs::create_directories(out_dir / "masks");

  const std::size_t total = static_cast<std::size_t>(n_defective) + n_nondefective;
  DatasetManifest manifest;
  manifest.samples.resize(total);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < total; i += step) {
      const bool defective = i < static_cast<std::size_t>(n_defective);
      const SynthSample s = render_synthetic(params, i, defective);
      const std::string stem = file_stem(i);
      const std::string dir = defective ? "defective" : "non_defective";
      write_png(out_dir / dir / (stem + ".png"), s.image);
      if (defective) write_png(out_dir / "masks" / (stem + ".png"), s.mask);
      Sample& sample = manifest.samples[i];
      sample.id = dir + "/" + stem;
      sample.path = dir + "/" + stem + ".png";
      sample.label = defective ? Label::Defective : Label::NonDefective;
      sample.brightness =
          brightness_category(s.image) == BrightnessClass::Bright ? Brightness::Bright : Brightness::Dark;
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(total, 1))));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(static_cast<std::size_t>(t), static_cast<std::size_t>(workers));
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }
  save_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace hidescan
