#include <cmath>
#include <functional>

#include "hudtrace/telemetry.hpp"

namespace hudtrace {

std::vector<FrameSample> samples_in_span(const std::vector<FrameSample>& samples, const GameSpan& span) {
  std::vector<FrameSample> out;
  for (const auto& s : samples) {
    if (s.t_s >= span.start_t_s && s.t_s < span.end_t_s) out.push_back(s);
  }
  return out;
}

namespace {

using CounterField = std::optional<int> FrameSample::*;

// Majority vote against the accepted history: a reading is rejected when it
// breaks monotonicity with the last accepted value, or when at least two of the
// following readings in the window contradict it while agreeing with history.
// Rejected slots carry the last accepted value.
void enforce_monotone(std::vector<FrameSample>& s, CounterField field,
                      const std::function<bool(int earlier, int later)>& violates, int window) {
  std::optional<int> last;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto v = s[i].*field;
    if (!v) continue;
    bool reject = last && violates(*last, *v);
    if (!reject) {
      int contra = 0;
      for (std::size_t j = i + 1; j < s.size() && j < i + static_cast<std::size_t>(window); ++j) {
        const auto w = s[j].*field;
        if (w && violates(*v, *w) && (!last || !violates(*last, *w))) ++contra;
      }
      reject = contra >= 2;
    }
    if (reject) {
      s[i].*field = last;
      s[i].flags |= kFlagRejected;
    } else {
      last = v;
    }
  }
}

double speed(const FrameSample& a, const FrameSample& b) {
  const double dt = b.t_s - a.t_s;
  const double d = std::hypot(b.pos->x - a.pos->x, b.pos->y - a.pos->y);
  return dt > 0 ? d / dt : (d == 0 ? 0.0 : INFINITY);
}

void reject_position(FrameSample& s) {
  s.pos.reset();
  s.flags |= kFlagRejected;
}

void gate_speed(std::vector<FrameSample>& s, double v_max) {
  std::vector<std::size_t> accepted;  // indices of accepted positioned samples
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].pos) continue;
    if (s[i].phase == Phase::Jump || accepted.empty() || speed(s[accepted.back()], s[i]) <= v_max) {
      accepted.push_back(i);
      continue;
    }
    // Two following fixes that agree with this one mean the history was wrong.
    std::vector<std::size_t> ahead;
    for (std::size_t j = i + 1; j < s.size() && ahead.size() < 2; ++j) {
      if (s[j].pos) ahead.push_back(j);
    }
    const bool relocalize = ahead.size() == 2 && speed(s[i], s[ahead[0]]) <= v_max &&
                            speed(s[ahead[0]], s[ahead[1]]) <= v_max;
    if (!relocalize) {
      reject_position(s[i]);
      continue;
    }
    while (!accepted.empty() && speed(s[accepted.back()], s[i]) > v_max) {
      reject_position(s[accepted.back()]);
      accepted.pop_back();
    }
    accepted.push_back(i);
  }
}

void interpolate_gaps(std::vector<FrameSample>& s, const FilterParams& p) {
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].pos) continue;
    if (prev && i > *prev + 1) {
      const auto& a = s[*prev];
      const auto& b = s[i];
      const double span = b.t_s - a.t_s;
      const double missing = span - p.sample_period_s;
      if (missing <= p.max_gap_s + 1e-9 && speed(a, b) <= p.v_max) {
        for (std::size_t k = *prev + 1; k < i; ++k) {
          const double f = (s[k].t_s - a.t_s) / span;
          s[k].pos = MapPosition{a.pos->x + f * (b.pos->x - a.pos->x),
                                 a.pos->y + f * (b.pos->y - a.pos->y),
                                 std::min(a.pos->score, b.pos->score)};
          s[k].flags |= kFlagInterpolated;
        }
      }
    }
    prev = i;
  }
}

}  // namespace

Track filter_track(const std::vector<FrameSample>& samples, const GameSpan& span,
                   const FilterParams& params) {
  Track track;
  track.span = span;
  track.samples = samples;
  auto& s = track.samples;
  enforce_monotone(s, &FrameSample::kills, [](int a, int b) { return b < a; }, params.vote_window);
  enforce_monotone(s, &FrameSample::players, [](int a, int b) { return b > a; }, params.vote_window);
  gate_speed(s, params.v_max);
  interpolate_gaps(s, params);
  return track;
}

}  // namespace hudtrace
