#include "hidescan/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "hidescan/error.hpp"

namespace hidescan {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void unreadable(const fs::path& path, const std::string& why) {
  throw Error(ErrorCode::UnreadableImage, path.string() + ": " + why);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// Only trivially destructible locals live in this frame because libpng reports errors
// through longjmp. Returns false and fills state.message on failure.
bool decode_png(std::FILE* file, PngReadState& state, int& height, int& width, int& channels,
                std::vector<std::uint8_t>& pixels, std::vector<png_bytep>& rows) {
  state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
  if (!state.png) return false;
  state.info = png_create_info_struct(state.png);
  if (!state.info) return false;
  if (setjmp(png_jmpbuf(state.png))) return false;
  png_init_io(state.png, file);
  png_read_info(state.png, state.info);
  const int bit_depth = png_get_bit_depth(state.png, state.info);
  const int color_type = png_get_color_type(state.png, state.info);
  if (bit_depth != 8) {
    std::snprintf(state.message, sizeof(state.message), "unsupported bit depth %d (only 8 is accepted)",
                  bit_depth);
    return false;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(state.png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(state.png);
  if (png_get_valid(state.png, state.info, PNG_INFO_tRNS)) png_set_strip_alpha(state.png);
  png_read_update_info(state.png, state.info);
  height = static_cast<int>(png_get_image_height(state.png, state.info));
  width = static_cast<int>(png_get_image_width(state.png, state.info));
  channels = png_get_channels(state.png, state.info);
  if (channels != 1 && channels != 3) {
    std::snprintf(state.message, sizeof(state.message), "unsupported channel count %d", channels);
    return false;
  }
  pixels.resize(static_cast<std::size_t>(height) * width * channels);
  rows.resize(height);
  for (int r = 0; r < height; ++r) rows[r] = pixels.data() + static_cast<std::size_t>(r) * width * channels;
  png_read_image(state.png, rows.data());
  png_read_end(state.png, nullptr);
  return true;
}

bool has_extension(const fs::path& path, std::string_view ext) {
  std::string e = path.extension().string();
  for (auto& ch : e) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return e == ext;
}

}  // namespace

Image read_png(const fs::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) unreadable(path, "cannot open file");
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0)
    unreadable(path, "not a PNG file");
  std::rewind(file.get());

  PngReadState state;
  int height = 0, width = 0, channels = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  const bool ok = decode_png(file.get(), state, height, width, channels, pixels, rows);
  png_destroy_read_struct(state.png ? &state.png : nullptr, state.info ? &state.info : nullptr, nullptr);
  if (!ok) unreadable(path, state.message[0] ? state.message : "corrupt PNG data");
  return Image(height, width, channels, std::move(pixels));
}

void write_png(const fs::path& path, const Image& img) {
  png_image out{};
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(img.width());
  out.height = static_cast<png_uint_32>(img.height());
  out.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&out, path.string().c_str(), 0, img.data().data(), 0, nullptr)) {
    std::string msg = out.message;
    png_image_free(&out);
    throw Error(ErrorCode::IoError, path.string() + ": " + msg);
  }
}

Image read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) unreadable(path, "cannot open file");
  auto next_token = [&]() {
    std::string token;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!token.empty()) break;
        continue;
      }
      token.push_back(c);
    }
    return token;
  };
  const std::string magic = next_token();
  int channels = 0;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else unreadable(path, "not a binary PGM/PPM file");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    unreadable(path, "malformed PNM header");
  }
  if (width < 1 || height < 1) unreadable(path, "invalid dimensions");
  if (maxval != 255) unreadable(path, "unsupported maxval " + std::to_string(maxval) + " (only 8-bit is accepted)");
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) unreadable(path, "truncated pixel data");
  return Image(height, width, channels, std::move(pixels));
}

void write_pnm(const fs::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << (img.channels() == 1 ? "P5" : "P6") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.data().size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Image read_image(const fs::path& path) {
  if (has_extension(path, ".png")) return read_png(path);
  if (has_extension(path, ".pgm") || has_extension(path, ".ppm") || has_extension(path, ".pnm"))
    return read_pnm(path);
  unreadable(path, "unrecognized image extension");
}

void write_image(const fs::path& path, const Image& img) {
  if (has_extension(path, ".png")) return write_png(path, img);
  if (has_extension(path, ".pgm") || has_extension(path, ".ppm") || has_extension(path, ".pnm"))
    return write_pnm(path, img);
  throw Error(ErrorCode::IoError, "unrecognized image extension: " + path.string());
}

}  // namespace hidescan
