#include <stdexcept>

#include "hudtrace/vision.hpp"

namespace hudtrace {

GrayImage to_luma(const RgbImage& rgb) {
  GrayImage g(rgb.width, rgb.height);
  const auto* p = rgb.pixels.data();
  for (auto& v : g.values) {
    // Weights in thousandths; +500 rounds half up like round() on non-negatives.
    v = static_cast<std::uint8_t>((299u * p[0] + 587u * p[1] + 114u * p[2] + 500u) / 1000u);
    p += 3;
  }
  return g;
}

GrayImage resize_nearest(const GrayImage& img, int width, int height) {
  if (width <= 0 || height <= 0 || img.empty()) throw std::invalid_argument("bad resize");
  if (width == img.width && height == img.height) return img;
  GrayImage out(width, height);
  std::vector<int> xs(width);
  for (int x = 0; x < width; ++x) {
    xs[x] = static_cast<int>((static_cast<std::int64_t>(2 * x + 1) * img.width) / (2 * width));
  }
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>((static_cast<std::int64_t>(2 * y + 1) * img.height) / (2 * height));
    const auto* src = img.values.data() + static_cast<std::size_t>(sy) * img.width;
    auto* dst = out.values.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) dst[x] = src[xs[x]];
  }
  return out;
}

GrayImage downsample2(const GrayImage& img) {
  GrayImage out(img.width / 2, img.height / 2);
  for (int y = 0; y < out.height; ++y) {
    const auto* a = img.values.data() + static_cast<std::size_t>(2 * y) * img.width;
    const auto* b = a + img.width;
    auto* dst = out.values.data() + static_cast<std::size_t>(y) * out.width;
    for (int x = 0; x < out.width; ++x) {
      dst[x] = static_cast<std::uint8_t>((a[2 * x] + a[2 * x + 1] + b[2 * x] + b[2 * x + 1] + 2) / 4);
    }
  }
  return out;
}

}  // namespace hudtrace
