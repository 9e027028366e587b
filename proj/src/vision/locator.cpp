#include <algorithm>
#include <stdexcept>

#include "hudtrace/vision.hpp"

namespace hudtrace {
namespace {

// A coarse mask pixel stays valid only if all four children are valid.
GrayImage downsample_mask(const GrayImage& m) {
  GrayImage out(m.width / 2, m.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const bool on = m.at(2 * x, 2 * y) && m.at(2 * x + 1, 2 * y) && m.at(2 * x, 2 * y + 1) &&
                      m.at(2 * x + 1, 2 * y + 1);
      out.at(x, y) = on ? 1 : 0;
    }
  }
  return out;
}

std::int64_t count_on(const GrayImage& m) {
  return std::count_if(m.values.begin(), m.values.end(), [](std::uint8_t v) { return v != 0; });
}

}  // namespace

MapLocator::MapLocator(const GrayImage& map, LocatorParams params) : params_(params) {
  if (map.empty()) throw std::invalid_argument("empty map image");
  GrayImage level = map;
  levels_.emplace_back(level);
  while (level.width / 2 >= 2 * params_.min_coarse_dim && level.height / 2 >= 2 * params_.min_coarse_dim) {
    level = downsample2(level);
    levels_.emplace_back(level);
  }
}

MatchResult MapLocator::locate(const GrayImage& templ, const GrayImage& mask) const {
  if (templ.width > map_width() || templ.height > map_height()) {
    throw std::invalid_argument("template larger than map");
  }
  std::vector<GrayImage> tpl{templ};
  std::vector<GrayImage> msk{mask};
  while (tpl.size() < levels_.size()) {
    const auto& t = tpl.back();
    if (t.width / 2 < params_.min_coarse_dim || t.height / 2 < params_.min_coarse_dim) break;
    GrayImage m = downsample_mask(msk.back());
    if (count_on(m) < kMinMaskSupport) break;
    tpl.push_back(downsample2(t));
    msk.push_back(std::move(m));
  }
  const int top = static_cast<int>(tpl.size()) - 1;

  // Exhaustive search on the coarsest level, then greedy peak picking.
  const NccTemplate coarse(tpl[top], &msk[top]);
  const auto& search = levels_[top];
  const int ox = search.width() - coarse.width() + 1;
  const int oy = search.height() - coarse.height() + 1;
  const auto scores = search.score_map(coarse);
  std::vector<int> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const auto keep = std::min<std::size_t>(order.size(), 64 * static_cast<std::size_t>(params_.candidates));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](int a, int b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; });
  std::vector<MatchResult> peaks;
  for (std::size_t i = 0; i < keep && static_cast<int>(peaks.size()) < params_.candidates; ++i) {
    const int x = order[i] % ox;
    const int y = order[i] / ox;
    const bool near = std::any_of(peaks.begin(), peaks.end(), [&](const MatchResult& p) {
      return std::abs(p.x - x) <= params_.suppression_px && std::abs(p.y - y) <= params_.suppression_px;
    });
    if (!near) peaks.push_back({x, y, scores[order[i]]});
  }
  (void)oy;

  std::vector<NccTemplate> prepared;
  prepared.reserve(tpl.size());
  for (std::size_t l = 0; l < tpl.size(); ++l) prepared.emplace_back(tpl[l], &msk[l]);

  auto better = [](const MatchResult& a, const MatchResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  };
  const int r = params_.refine_radius;
  for (int l = top - 1; l >= 0; --l) {
    for (MatchResult& p : peaks) {
      const int cx = 2 * p.x, cy = 2 * p.y;
      p = levels_[l].best(prepared[l], cx - r, cy - r, cx + r + 1, cy + r + 1);
    }
    std::stable_sort(peaks.begin(), peaks.end(), better);
    const std::size_t survivors =
        std::max<std::size_t>(static_cast<std::size_t>(std::max(1, params_.min_survivors)), (peaks.size() + 1) / 2);
    if (l > 0 && peaks.size() > survivors) peaks.resize(survivors);
  }
  MatchResult best{0, 0, -2.0};
  for (const auto& p : peaks) {
    if (better(p, best)) best = p;
  }
  if (best.score < -1.0) best = {0, 0, 0.0};
  return best;
}

}  // namespace hudtrace
