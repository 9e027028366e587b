#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hudtrace/vision.hpp"

namespace hudtrace {

NccTemplate::NccTemplate(const GrayImage& templ, const GrayImage* mask)
    : width_(templ.width), height_(templ.height) {
  if (templ.empty()) throw std::invalid_argument("empty template");
  if (mask && (mask->width != templ.width || mask->height != templ.height)) {
    throw std::invalid_argument("mask dimensions differ from template");
  }
  weights_.assign(templ.values.size(), 0);
  std::int64_t sq = 0;
  for (int y = 0; y < height_; ++y) {
    int run_start = -1;
    for (int x = 0; x <= width_; ++x) {
      const bool on = x < width_ && (!mask || mask->at(x, y) != 0);
      if (on) {
        const int v = templ.at(x, y);
        weights_[static_cast<std::size_t>(y) * width_ + x] = static_cast<std::int16_t>(v);
        ++n_;
        sum_ += v;
        sq += v * v;
        if (run_start < 0) run_start = x;
      } else if (run_start >= 0) {
        runs_.push_back({y, run_start, x});
        run_start = -1;
      }
    }
  }
  if (mask && n_ < kMinMaskSupport) {
    throw std::invalid_argument("mask support " + std::to_string(n_) + " below " +
                                std::to_string(kMinMaskSupport) + " pixels");
  }
  var_n2_ = n_ * sq - sum_ * sum_;
}

NccSearchImage::NccSearchImage(const GrayImage& search)
    : width_(search.width), height_(search.height) {
  values_.assign(search.values.begin(), search.values.end());
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  prefix_.assign(stride * height_, 0);
  prefix_sq_.assign(stride * height_, 0);
  for (int y = 0; y < height_; ++y) {
    std::int32_t s = 0, q = 0;
    const auto* row = search.values.data() + static_cast<std::size_t>(y) * width_;
    auto* p = prefix_.data() + y * stride;
    auto* pq = prefix_sq_.data() + y * stride;
    for (int x = 0; x < width_; ++x) {
      s += row[x];
      q += row[x] * row[x];
      p[x + 1] = s;
      pq[x + 1] = q;
    }
  }
}

namespace {

inline std::int32_t dot_row(const std::int16_t* t, const std::int16_t* s, int n) {
  std::int32_t acc = 0;
  for (int i = 0; i < n; ++i) acc += static_cast<std::int32_t>(t[i]) * s[i];
  return acc;
}

}  // namespace

double NccSearchImage::score(const NccTemplate& t, int x, int y) const {
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  std::int64_t ss = 0, sq = 0;
  for (const auto& r : t.runs_) {
    const auto* p = prefix_.data() + (y + r.row) * stride + x;
    const auto* pq = prefix_sq_.data() + (y + r.row) * stride + x;
    ss += p[r.end] - p[r.begin];
    sq += pq[r.end] - pq[r.begin];
  }
  const std::int64_t var_s = t.n_ * sq - ss * ss;
  if (t.var_n2_ == 0 || var_s == 0) return 0.0;
  std::int64_t cross = 0;
  for (int row = 0; row < t.height_; ++row) {
    cross += dot_row(t.weights_.data() + static_cast<std::size_t>(row) * t.width_,
                     values_.data() + static_cast<std::size_t>(y + row) * width_ + x, t.width_);
  }
  const std::int64_t num = t.n_ * cross - t.sum_ * ss;
  const double r = static_cast<double>(num) /
                   (std::sqrt(static_cast<double>(t.var_n2_)) * std::sqrt(static_cast<double>(var_s)));
  return std::clamp(r, -1.0, 1.0);
}

MatchResult NccSearchImage::best(const NccTemplate& t, int x0, int y0, int x1, int y1) const {
  if (t.width_ > width_ || t.height_ > height_) {
    throw std::invalid_argument("template larger than search image");
  }
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width_ - t.width_);
  y1 = std::min(y1, height_ - t.height_);
  MatchResult best{x0, y0, -2.0};
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double s = score(t, x, y);
      if (s > best.score) best = {x, y, s};
    }
  }
  if (best.score < -1.0) best.score = 0.0;  // empty window
  return best;
}

MatchResult NccSearchImage::best(const NccTemplate& t) const {
  return best(t, 0, 0, width_ - t.width(), height_ - t.height());
}

std::vector<double> NccSearchImage::score_map(const NccTemplate& t) const {
  if (t.width_ > width_ || t.height_ > height_) {
    throw std::invalid_argument("template larger than search image");
  }
  const int ox = width_ - t.width_ + 1;
  const int oy = height_ - t.height_ + 1;
  std::vector<double> out(static_cast<std::size_t>(ox) * oy);
  for (int y = 0; y < oy; ++y) {
    for (int x = 0; x < ox; ++x) out[static_cast<std::size_t>(y) * ox + x] = score(t, x, y);
  }
  return out;
}

MatchResult ncc_match(const GrayImage& templ, const GrayImage& search) {
  if (templ.width > search.width || templ.height > search.height) {
    throw std::invalid_argument("template larger than search image");
  }
  return NccSearchImage(search).best(NccTemplate(templ));
}

MatchResult ncc_match(const GrayImage& templ, const GrayImage& search, const GrayImage& mask) {
  if (templ.width > search.width || templ.height > search.height) {
    throw std::invalid_argument("template larger than search image");
  }
  return NccSearchImage(search).best(NccTemplate(templ, &mask));
}

GrayImage center_disk_mask(int width, int height, double radius_px) {
  GrayImage m(width, height, 1);
  if (radius_px <= 0) return m;
  const double cx = 0.5 * width - 0.5;
  const double cy = 0.5 * height - 0.5;
  const double r2 = radius_px * radius_px;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r2) m.at(x, y) = 0;
    }
  }
  return m;
}

}  // namespace hudtrace
