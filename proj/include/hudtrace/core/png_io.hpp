#pragma once

#include <filesystem>

#include "hudtrace/core/image.hpp"

namespace hudtrace {

// Any PNG colour type is expanded to 8-bit RGB (alpha dropped, gray replicated).
RgbImage read_png_rgb(const std::filesystem::path& path);
// Any PNG colour type reduced to 8-bit luma with the same weights as to_luma.
GrayImage read_png_gray(const std::filesystem::path& path);

// compression: zlib level 0..9.
void write_png(const std::filesystem::path& path, const RgbImage& img, int compression = 3);
void write_png(const std::filesystem::path& path, const GrayImage& img, int compression = 6);

}  // namespace hudtrace
