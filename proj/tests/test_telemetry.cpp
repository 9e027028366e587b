#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hudtrace/core/random.hpp"
#include "hudtrace/synth.hpp"
#include "hudtrace/telemetry.hpp"
#include "test_util.hpp"

using namespace hudtrace;

namespace {

// One-second scenario holding a fixed HUD state.
Scenario still_scenario(Point2 pos, int kills, int players, Phase phase, bool in_game = true) {
  Scenario s;
  s.stream_length_s = 1;
  if (in_game) {
    s.game_start_s = 0;
    s.game_end_s = 1;
    s.path = {pos};
    s.schedule = {{phase, 0, 1}};
    for (int k = 0; k < kills; ++k) s.kills.push_back({0, pos});
    s.eliminations = {{0, players}};
  } else {
    s.game_start_s = 5;
    s.game_end_s = 6;
    s.path = {pos};
    s.schedule = {{Phase::Lobby, 0, 5}};
  }
  return s;
}

Frame frame_of(const RgbImage& img) {
  Frame f;
  f.image = img;
  return f;
}

FrameSample at(double t, Phase p) {
  FrameSample s;
  s.t_s = t;
  s.phase = p;
  return s;
}

std::vector<FrameSample> phases(std::initializer_list<std::pair<int, Phase>> runs) {
  std::vector<FrameSample> out;
  for (auto [n, p] : runs)
    for (int i = 0; i < n; ++i) out.push_back(at(static_cast<double>(out.size()), p));
  return out;
}

void expect_track_invariants(const Track& t, double v_max) {
  std::optional<int> k, pl;
  const FrameSample* prev_pos = nullptr;
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto& s = t.samples[i];
    if (i) ASSERT_LT(t.samples[i - 1].t_s, s.t_s);
    if (s.kills) {
      if (k) ASSERT_GE(*s.kills, *k);
      k = s.kills;
    }
    if (s.players) {
      if (pl) ASSERT_LE(*s.players, *pl);
      pl = s.players;
    }
    if (s.pos) {
      if (prev_pos && s.phase != Phase::Jump) {
        const double v = std::hypot(s.pos->x - prev_pos->pos->x, s.pos->y - prev_pos->pos->y) /
                         (s.t_s - prev_pos->t_s);
        ASSERT_LE(v, v_max + 1e-9) << "t=" << s.t_s;
      }
      prev_pos = &s;
    }
  }
}

}  // namespace

TEST(Telemetry, ExtractSampleFromRenderedFrame) {
  const auto sc = still_scenario({1000, 700}, 12, 43, Phase::Contraction);
  const ScenarioRenderer r(sc, testutil::world());
  const auto s = extract_sample(frame_of(r.render(0)), testutil::context());
  ASSERT_TRUE(s.pos.has_value());
  EXPECT_LE(std::hypot(s.pos->x - 1000, s.pos->y - 700), 3.0);
  EXPECT_EQ(s.kills, 12);
  EXPECT_EQ(s.players, 43);
  EXPECT_EQ(s.phase, Phase::Contraction);
}

TEST(Telemetry, BlankedMinimapLeavesPositionAbsent) {
  const auto sc = still_scenario({900, 1200}, 3, 80, Phase::StormBrewing);
  const ScenarioRenderer r(sc, testutil::world());
  RgbImage img = r.render(0);
  const auto rect = rasterize(testutil::world().layout.minimap, img.width, img.height);
  for (int y = rect.y; y < rect.y + rect.h; ++y)
    for (int x = rect.x; x < rect.x + rect.w; ++x) img.set(x, y, 0, 0, 0);
  const auto s = extract_sample(frame_of(img), testutil::context());
  EXPECT_FALSE(s.pos.has_value());
  EXPECT_EQ(s.kills, 3);
  EXPECT_EQ(s.players, 80);
  EXPECT_EQ(s.phase, Phase::StormBrewing);
}

TEST(Telemetry, LobbyFrameHasNoCounters) {
  const auto sc = still_scenario({1000, 700}, 0, 100, Phase::Lobby, false);
  const ScenarioRenderer r(sc, testutil::world());
  const auto s = extract_sample(frame_of(r.render(0)), testutil::context());
  EXPECT_EQ(s.phase, Phase::Lobby);
  EXPECT_FALSE(s.kills.has_value());
  EXPECT_FALSE(s.players.has_value());
  EXPECT_FALSE(s.pos.has_value());
}

TEST(Telemetry, ExtractionIsDeterministic) {
  const auto sc = still_scenario({1400, 500}, 7, 21, Phase::Jump);
  const ScenarioRenderer r(sc, testutil::world(), {8.0, 0.0, 5});
  const auto img = r.render(0);
  const auto a = extract_sample(frame_of(img), testutil::context());
  const auto b = extract_sample(frame_of(img), testutil::context());
  ASSERT_EQ(a.pos.has_value(), b.pos.has_value());
  if (a.pos) {
    EXPECT_EQ(a.pos->x, b.pos->x);
    EXPECT_EQ(a.pos->score, b.pos->score);
  }
  EXPECT_EQ(a.kills, b.kills);
  EXPECT_EQ(a.phase_score, b.phase_score);
}

TEST(Telemetry, SegmentSingleGame) {
  std::vector<FrameSample> s = phases({{30, Phase::Lobby}, {25, Phase::Jump}});
  for (int i = 0; i < 1200; ++i) s.push_back(at(s.size(), (i / 100) % 2 ? Phase::Contraction : Phase::StormBrewing));
  for (int i = 0; i < 40; ++i) s.push_back(at(s.size(), Phase::Lobby));
  const auto spans = segment_games(s, "src");
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].start_t_s, 30);
  EXPECT_EQ(spans[0].end_t_s, 1255);
  EXPECT_EQ(spans[0].game_id, "src-g01");
}

TEST(Telemetry, SegmentAllLobbyAndTwoGames) {
  EXPECT_TRUE(segment_games(phases({{500, Phase::Lobby}}), "x").empty());
  const auto s = phases({{20, Phase::Lobby},
                         {20, Phase::Jump},
                         {100, Phase::StormBrewing},
                         {15, Phase::Unknown},
                         {30, Phase::Jump},
                         {200, Phase::Contraction},
                         {12, Phase::Lobby}});
  const auto spans = segment_games(s, "x");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].start_t_s, 20);
  EXPECT_EQ(spans[0].end_t_s, 140);
  EXPECT_EQ(spans[1].start_t_s, 155);
  EXPECT_EQ(spans[1].end_t_s, 385);
}

TEST(Telemetry, SegmentToleratesShortUnknownGapsAndDropsFalseStarts) {
  const auto s = phases({{20, Phase::Lobby},
                         {20, Phase::Jump},
                         {50, Phase::StormBrewing},
                         {9, Phase::Unknown},
                         {50, Phase::StormBrewing},
                         {20, Phase::Lobby},
                         {30, Phase::Jump},  // 30 s false start
                         {20, Phase::Lobby}});
  const auto spans = segment_games(s, "x");
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].start_t_s, 20);
  EXPECT_EQ(spans[0].end_t_s, 149);
}

TEST(Telemetry, SegmentFuzzSpansAreOrderedDisjointAndLongEnough) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::vector<FrameSample> s;
    const int runs = rng.range(1, 30);
    for (int r = 0; r < runs; ++r) {
      const Phase p = static_cast<Phase>(rng.range(0, 4));
      const int n = rng.range(1, 120);
      for (int i = 0; i < n; ++i) s.push_back(at(s.size(), p));
    }
    const auto spans = segment_games(s, "f");
    for (std::size_t i = 0; i < spans.size(); ++i) {
      EXPECT_GE(spans[i].duration(), 60);
      if (i) EXPECT_LE(spans[i - 1].end_t_s, spans[i].start_t_s);
    }
  }
}

TEST(Telemetry, FilterKillsMajorityVote) {
  std::vector<FrameSample> s;
  for (int k : {3, 4, 2, 4, 5}) {
    auto f = at(s.size(), Phase::StormBrewing);
    f.kills = k;
    s.push_back(f);
  }
  const auto t = filter_track(s, {"g", 0, 5});
  std::vector<int> kills;
  int rejected = 0;
  for (const auto& f : t.samples) {
    kills.push_back(*f.kills);
    rejected += (f.flags & kFlagRejected) != 0;
  }
  EXPECT_EQ(kills, (std::vector<int>{3, 4, 4, 4, 5}));
  EXPECT_EQ(rejected, 1);
  EXPECT_TRUE(t.samples[2].flags & kFlagRejected);
}

TEST(Telemetry, FilterIsIdentityOnCleanTracks) {
  std::vector<FrameSample> s;
  for (int i = 0; i < 100; ++i) {
    auto f = at(i, i < 20 ? Phase::Jump : Phase::StormBrewing);
    f.pos = MapPosition{500.0 + 3 * i, 600.0 - 2 * i, 0.9};
    f.kills = i / 30;
    f.players = 100 - i / 2;
    s.push_back(f);
  }
  const auto t = filter_track(s, {"g", 0, 100});
  ASSERT_EQ(t.samples.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(t.samples[i].flags, kFlagRaw);
    EXPECT_EQ(t.samples[i].pos->x, s[i].pos->x);
    EXPECT_EQ(t.samples[i].kills, s[i].kills);
    EXPECT_EQ(t.samples[i].players, s[i].players);
  }
}

TEST(Telemetry, FilterRejectsJumpAndReinterpolates) {
  std::vector<FrameSample> s;
  for (int i = 0; i < 30; ++i) {
    auto f = at(i, Phase::StormBrewing);
    f.pos = MapPosition{1000.0 + i, 1000.0, 0.9};
    s.push_back(f);
  }
  s[15].pos->x += 500;
  const auto t = filter_track(s, {"g", 0, 30});
  EXPECT_TRUE(t.samples[15].flags & kFlagInterpolated);
  ASSERT_TRUE(t.samples[15].pos.has_value());
  EXPECT_NEAR(t.samples[15].pos->x, 1015.0, 1e-9);
  for (int i = 0; i < 30; ++i)
    if (i != 15) {
      EXPECT_EQ(t.samples[i].flags, kFlagRaw);
    }
}

TEST(Telemetry, FilterInterpolatesOnlyShortGaps) {
  std::vector<FrameSample> s;
  for (int i = 0; i < 40; ++i) {
    auto f = at(i, Phase::StormBrewing);
    if (!((i >= 5 && i < 10) || (i >= 20 && i < 26))) f.pos = MapPosition{2.0 * i + 300, 300, 0.9};
    s.push_back(f);
  }
  const auto t = filter_track(s, {"g", 0, 40});
  for (int i = 5; i < 10; ++i) {
    ASSERT_TRUE(t.samples[i].pos.has_value()) << i;
    EXPECT_NEAR(t.samples[i].pos->x, 2.0 * i + 300, 1e-9);
    EXPECT_TRUE(t.samples[i].flags & kFlagInterpolated);
  }
  for (int i = 20; i < 26; ++i) EXPECT_FALSE(t.samples[i].pos.has_value()) << i;
}

TEST(Telemetry, FilterFuzzRestoresTrackInvariants) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    std::vector<FrameSample> s;
    double x = 1000, y = 1000;
    int kills = 0, players = 100;
    const int n = rng.range(5, 300);
    for (int i = 0; i < n; ++i) {
      auto f = at(i, i < 20 ? Phase::Jump : Phase::StormBrewing);
      x += rng.uniform(-8, 8);
      y += rng.uniform(-8, 8);
      if (rng.chance(0.05)) ++kills;
      if (rng.chance(0.2)) players = std::max(1, players - 1);
      if (!rng.chance(0.1)) {
        f.pos = MapPosition{x, y, 0.9};
        if (rng.chance(0.08)) f.pos->x += rng.uniform(-600, 600);
      }
      if (!rng.chance(0.1)) f.kills = rng.chance(0.08) ? rng.range(0, 99) : kills;
      if (!rng.chance(0.1)) f.players = rng.chance(0.08) ? rng.range(1, 100) : players;
      s.push_back(f);
    }
    const auto t = filter_track(s, {"g", 0, static_cast<double>(n)});
    expect_track_invariants(t, 40);
  }
}

TEST(Telemetry, CsvRoundTrip) {
  testutil::TempDir dir("tele");
  Track t;
  t.span = {"vod-g01", 10, 13};
  for (int i = 0; i < 3; ++i) {
    auto f = at(10 + i, i ? Phase::StormBrewing : Phase::Jump);
    if (i != 1) f.pos = MapPosition{100.25 + i, 200.5, 0.875};
    f.players = 50 - i;
    if (i) f.kills = i;
    f.flags = i == 2 ? kFlagInterpolated : kFlagRaw;
    t.samples.push_back(f);
  }
  {
    std::ofstream out(dir / "t.csv");
    write_telemetry_csv(out, {t});
  }
  const auto text = testutil::slurp(dir / "t.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "game_id,t_s,phase,x,y,pos_score,players,kills,flag");
  const auto back = read_telemetry_csv(dir / "t.csv");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].span.game_id, "vod-g01");
  EXPECT_EQ(back[0].span.start_t_s, 10);
  EXPECT_EQ(back[0].span.end_t_s, 13);
  ASSERT_EQ(back[0].samples.size(), 3u);
  EXPECT_FALSE(back[0].samples[1].pos.has_value());
  EXPECT_NEAR(back[0].samples[2].pos->x, 102.25, 1e-9);
  EXPECT_FALSE(back[0].samples[0].kills.has_value());
  EXPECT_EQ(back[0].samples[2].flags, kFlagInterpolated);
  EXPECT_EQ(back[0].samples[0].phase, Phase::Jump);
}
