#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"

#include "hidescan/canny.hpp"
#include "hidescan/error.hpp"
#include "hidescan/image.hpp"
#include "hidescan/image_io.hpp"
#include "hidescan/random.hpp"

using namespace hidescan;
namespace fs = std::filesystem;

namespace {

Image random_image(int h, int w, int ch, Rng& rng) {
  Image img(h, w, ch);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

// Blocky random image: smooth regions with sharp steps, closer to what Canny sees in practice.
Image random_blocks(int h, int w, Rng& rng) {
  Image img(h, w, 1);
  const int cell = 2 + static_cast<int>(rng.below(6));
  std::vector<std::uint8_t> levels(static_cast<std::size_t>((h / cell + 1) * (w / cell + 1)));
  for (auto& l : levels) l = static_cast<std::uint8_t>(rng.below(256));
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img.at(r, c) = levels[static_cast<std::size_t>((r / cell) * (w / cell + 1) + c / cell)];
  return img;
}

std::vector<std::vector<int>> as_grid(const EdgeMap& e) {
  std::vector<std::vector<int>> g(e.height(), std::vector<int>(e.width()));
  for (int r = 0; r < e.height(); ++r)
    for (int c = 0; c < e.width(); ++c) g[r][c] = e.at(r, c) == 255 ? 1 : 0;
  return g;
}

bool subset_of(const EdgeMap& a, const EdgeMap& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.data()[i] == 255 && b.data()[i] != 255) return false;
  return true;
}

fs::path data_dir() { return fs::path(HIDESCAN_TEST_DATA); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hidescan_imagecore";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("image construction validates its invariants") {
  CHECK_THROWS_WITH_AS(Image(0, 4, 1), doctest::Contains("InvalidDimension"), Error);
  CHECK_THROWS_WITH_AS(Image(4, 4, 2), doctest::Contains("ChannelMismatch"), Error);
  CHECK_THROWS_AS(Image(2, 2, 1, std::vector<std::uint8_t>(3)), Error);
  const Image img(3, 4, 3, 9);
  CHECK(img.data().size() == 36);
  CHECK(img.at(2, 3, 2) == 9);
  CHECK_THROWS_WITH(EdgeMap(1, 2, {0, 7}), doctest::Contains("NonBinaryInput"));
  CHECK(EdgeMap(1, 2, {0, 255}).edge_count() == 1);
}

TEST_CASE("rounding is half up then clamped") {
  CHECK(round_to_u8(127.5) == 128);
  CHECK(round_to_u8(127.49999) == 127);
  CHECK(round_to_u8(-3.0) == 0);
  CHECK(round_to_u8(300.0) == 255);
}

TEST_CASE("grayscale conversion") {
  CHECK(to_grayscale(Image(2, 2, 3, 255)) == Image(2, 2, 1, 255));
  CHECK(to_grayscale(Image(2, 2, 3, 0)) == Image(2, 2, 1, 0));
  Image red(3, 3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) red.at(r, c, 0) = 255;
  CHECK(to_grayscale(red) == Image(3, 3, 1, 76));
  Image mixed(1, 1, 3, std::vector<std::uint8_t>{10, 200, 30});
  CHECK(to_grayscale(mixed).at(0, 0) == 124);  // 2.989 + 117.4 + 3.42 = 123.809
  CHECK_THROWS_WITH(to_grayscale(Image(2, 2, 1)), doctest::Contains("ChannelMismatch"));
}

TEST_CASE("grayscale of a replicated gray image is the image itself") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Image g = random_image(1 + static_cast<int>(rng.below(20)), 1 + static_cast<int>(rng.below(20)), 1, rng);
    CHECK(to_grayscale(replicate_channels(g)) == g);
  }
}

TEST_CASE("resize") {
  Rng rng(2);
  const Image img = random_image(50, 50, 3, rng);
  CHECK(resize(img, 50, 50) == img);
  CHECK(resize(Image(400, 400, 1, 37), 50, 50) == Image(50, 50, 1, 37));
  CHECK(resize(Image(2, 2, 1, std::vector<std::uint8_t>{0, 255, 255, 0}), 1, 1).at(0, 0) == 128);
  CHECK_THROWS_WITH_AS(resize(img, 0, 5), doctest::Contains("InvalidDimension"), Error);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(40)), w = 1 + static_cast<int>(rng.below(40));
    const int oh = 1 + static_cast<int>(rng.below(60)), ow = 1 + static_cast<int>(rng.below(60));
    const Image src = random_image(h, w, trial % 2 ? 3 : 1, rng);
    const Image out = resize(src, oh, ow);
    CHECK(out.height() == oh);
    CHECK(out.width() == ow);
    CHECK(out.channels() == src.channels());
    CHECK(out == oracle::resize(src, oh, ow));
  }
}

TEST_CASE("canny parameter validation") {
  CHECK_THROWS_WITH_AS(canny(Image(8, 8, 1), {0.9, 0.5}), doctest::Contains("InvalidThreshold"), Error);
  CHECK_THROWS_AS(canny(Image(8, 8, 1), {0.5, 0.5}), Error);
  CHECK_THROWS_AS(canny(Image(8, 8, 1), {-0.1, 0.5}), Error);
  CHECK_THROWS_AS(canny(Image(8, 8, 1), {0.1, 1.5}), Error);
  CHECK_THROWS_AS(canny(Image(8, 8, 1), {0.1, 0.5, 0.0}), Error);
  CHECK_THROWS_WITH(canny(Image(8, 8, 3), {}), doctest::Contains("ChannelMismatch"));
}

TEST_CASE("canny on constant images is empty") {
  for (int v : {0, 37, 255}) CHECK(canny(Image(50, 50, 1, static_cast<std::uint8_t>(v))).edge_count() == 0);
}

TEST_CASE("canny on a vertical step") {
  Image step(10, 10, 1);
  for (int r = 0; r < 10; ++r)
    for (int c = 5; c < 10; ++c) step.at(r, c) = 255;
  const CannyParams p{0.2, 0.5, 1.0};
  const EdgeMap e = canny(step, p);
  CHECK(e.edge_count() > 0);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c)
      if (e.at(r, c) == 255) CHECK((c == 4 || c == 5));
  CHECK(as_grid(e) == oracle::canny(step, p));
}

TEST_CASE("canny matches the reference implementation on random images") {
  const CannyParams configs[] = {{}, {0.2, 0.5, 1.0}, {0.05, 0.3, 2.0}, {0.0, 0.1, 0.7}};
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    Rng rng(derive_seed(2024, seed));
    const Image img = seed % 2 ? random_image(32, 32, 1, rng) : random_blocks(32, 32, rng);
    const CannyParams& p = configs[seed % 4];
    const EdgeMap ours = canny(img, p);
    const auto ref = oracle::canny(img, p);
    CHECK_MESSAGE(as_grid(ours) == ref, "seed " << seed);
  }
}

TEST_CASE("canny thresholds shrink the edge set monotonically") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Image img = trial % 2 ? random_image(24, 24, 1, rng) : random_blocks(24, 24, rng);
    const EdgeMap base = canny(img, {0.2, 0.6});
    const EdgeMap higher_low = canny(img, {0.4, 0.6});
    const EdgeMap higher_high = canny(img, {0.2, 0.8});
    CHECK(subset_of(higher_low, base));
    CHECK(subset_of(higher_high, base));
    for (std::uint8_t v : base.data()) CHECK((v == 0 || v == 255));
  }
}

TEST_CASE("png and pnm round trips") {
  Rng rng(4);
  for (int ch : {1, 3}) {
    const Image img = random_image(7, 11, ch, rng);
    const auto png = scratch("rt" + std::to_string(ch) + ".png");
    write_image(png, img);
    CHECK(read_image(png) == img);
    const auto pnm = scratch(ch == 1 ? "rt.pgm" : "rt.ppm");
    write_image(pnm, img);
    CHECK(read_image(pnm) == img);
  }
}

TEST_CASE("image loaders") {
  CHECK_THROWS_WITH_AS(read_image(data_dir() / "gray16.png"), doctest::Contains("UnreadableImage"), Error);
  CHECK_THROWS_WITH(read_image(data_dir() / "bilevel.png"), doctest::Contains("UnreadableImage"));
  const Image pal = read_image(data_dir() / "palette.png");
  CHECK(pal.channels() == 3);
  CHECK(pal.height() == 4);
  const Image rgba = read_image(data_dir() / "rgba.png");
  CHECK(rgba.channels() == 3);
  CHECK(rgba == Image(3, 5, 3, 200));
  CHECK_THROWS_WITH(read_image(scratch("missing.png")), doctest::Contains("UnreadableImage"));

  const auto junk = scratch("junk.png");
  std::ofstream(junk) << "not an image";
  CHECK_THROWS_WITH(read_image(junk), doctest::Contains("UnreadableImage"));
  const auto deep = scratch("deep.pgm");
  std::ofstream(deep, std::ios::binary) << "P5\n2 1\n65535\n" << std::string(4, '\0');
  CHECK_THROWS_WITH(read_image(deep), doctest::Contains("UnreadableImage"));
  const auto truncated = scratch("short.pgm");
  std::ofstream(truncated, std::ios::binary) << "P5\n4 4\n255\n" << std::string(3, '\1');
  CHECK_THROWS_WITH(read_image(truncated), doctest::Contains("UnreadableImage"));
}
