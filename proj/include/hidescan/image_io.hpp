#pragma once

#include <filesystem>

#include "hidescan/image.hpp"

namespace hidescan {

// Readers throw UnreadableImage (naming the file) on corrupt input or bit depths other than 8.

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

/// Binary PGM (P5) or PPM (P6) with maxval 255.
Image read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const Image& img);

/// Dispatches on the extension: .png, .pgm, .ppm, .pnm.
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& img);

}  // namespace hidescan
