#pragma once

#include <algorithm>

namespace hudtrace {

// Rectangle in normalized [0,1]^2 frame coordinates.
struct NormRect {
  double x = 0, y = 0, w = 0, h = 0;

  [[nodiscard]] bool inside_unit() const noexcept {
    constexpr double eps = 1e-9;
    return x >= -eps && y >= -eps && w > 0 && h > 0 && x + w <= 1 + eps && y + h <= 1 + eps;
  }
  // Interior intersection; rectangles that only touch do not overlap.
  [[nodiscard]] bool overlaps(const NormRect& o) const noexcept {
    constexpr double eps = 1e-9;
    return std::min(x + w, o.x + o.w) - std::max(x, o.x) > eps &&
           std::min(y + h, o.y + o.h) - std::max(y, o.y) > eps;
  }
};

struct PixelRect {
  int x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct Point2 {
  double x = 0, y = 0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

}  // namespace hudtrace
