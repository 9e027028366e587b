#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hudtrace {

// Row-major interleaved 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("negative image size");
  }

  [[nodiscard]] bool empty() const noexcept { return width == 0 || height == 0; }
  [[nodiscard]] std::uint8_t* at(int x, int y) noexcept {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  [[nodiscard]] const std::uint8_t* at(int x, int y) const noexcept {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    auto* p = at(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// Row-major 8-bit single channel raster.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("negative image size");
  }

  [[nodiscard]] bool empty() const noexcept { return width == 0 || height == 0; }
  [[nodiscard]] std::uint8_t& at(int x, int y) noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  [[nodiscard]] std::uint8_t at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  [[nodiscard]] std::span<const std::uint8_t> row(int y) const noexcept {
    return {values.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)};
  }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

}  // namespace hudtrace
