#include "hudtrace/core/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "hudtrace/core/error.hpp"

namespace hudtrace {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw InputError("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// Decodes into 8-bit RGB; libpng transformations handle every input colour type.
RgbImage decode(const std::filesystem::path& path) {
  File f = open_file(path, "rb");
  std::string what;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &what, png_error_fn, png_warning_fn);
  if (!png) throw InputError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  RgbImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("bad png " + path.string() + ": " + what);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(w) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("unsupported png layout in " + path.string());
  }
  img = RgbImage(w, h);
  rows.resize(h);
  for (int y = 0; y < h; ++y) rows[y] = img.at(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void encode(const std::filesystem::path& path, int w, int h, int color_type, int channels,
            const std::uint8_t* data, int compression) {
  File f = open_file(path, "wb");
  std::string what;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &what, png_error_fn, png_warning_fn);
  if (!png) throw InputError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("png write failed for " + path.string() + ": " + what);
  }
  png_init_io(png, f.get());
  png_set_compression_level(png, compression);
  // Fast levels skip the adaptive filter search, which dominates write time.
  if (compression <= 3) png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(y) * w * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

RgbImage read_png_rgb(const std::filesystem::path& path) { return decode(path); }

GrayImage read_png_gray(const std::filesystem::path& path) {
  const RgbImage rgb = decode(path);
  GrayImage g(rgb.width, rgb.height);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const auto* p = rgb.pixels.data() + i * 3;
    g.values[i] = static_cast<std::uint8_t>((299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000);
  }
  return g;
}

void write_png(const std::filesystem::path& path, const RgbImage& img, int compression) {
  encode(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.pixels.data(), compression);
}

void write_png(const std::filesystem::path& path, const GrayImage& img, int compression) {
  encode(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 1, img.values.data(), compression);
}

}  // namespace hudtrace
