#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/random.hpp"
#include "hudtrace/maps.hpp"
#include "hudtrace/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hudtrace;

namespace {

GridSpec unit_spec(int w, int h, GridKind kind = GridKind::Activity) {
  return GridSpec{w, h, {0, 0, static_cast<double>(w), static_cast<double>(h)}, kind};
}

void add_blob(HeatGrid& g, double cx, double cy, double sigma, double amp) {
  for (int y = 0; y < g.spec.grid_h; ++y)
    for (int x = 0; x < g.spec.grid_w; ++x) {
      const double d2 = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
      g.at(x, y) += amp * std::exp(-d2 / (2 * sigma * sigma));
    }
}

std::vector<std::uint8_t> cells_of(const HotSpot& h, int w, int hgt) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * hgt, 0);
  for (const auto& r : h.cells)
    for (int x = r.x_begin; x < r.x_end; ++x) m[static_cast<std::size_t>(r.y) * w + x] = 1;
  return m;
}

// Whole extraction recomputed from definitions: threshold, morphology, flood
// fill, area filter. Returns sorted cell-index lists.
std::set<std::vector<int>> oracle_components(const HeatGrid& g, const HotSpotParams& p) {
  const int w = g.spec.grid_w, h = g.spec.grid_h;
  double mx = 0;
  for (double v : g.cells) mx = std::max(mx, v);
  std::vector<std::uint8_t> m(g.cells.size(), 0);
  if (mx > 0)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.cells[i] > 0 && g.cells[i] >= p.threshold_frac * mx;
  for (int i = 0; i < p.erode_n; ++i) m = oracle::morph(m, w, h, true);
  for (int i = 0; i < p.dilate_n; ++i) m = oracle::morph(m, w, h, false);
  std::set<std::vector<int>> out;
  for (auto& c : oracle::components8(m, w, h))
    if (static_cast<int>(c.size()) >= p.min_area) out.insert(c);
  return out;
}

std::set<std::vector<int>> library_components(const HotSpotMap& map) {
  std::set<std::vector<int>> out;
  for (const auto& h : map.hotspots) {
    std::vector<int> c;
    for (const auto& r : h.cells)
      for (int x = r.x_begin; x < r.x_end; ++x) c.push_back(r.y * map.spec.grid_w + x);
    std::sort(c.begin(), c.end());
    out.insert(c);
  }
  return out;
}

HeatGrid random_grid(std::uint64_t seed) {
  Rng rng(seed);
  HeatGrid g(unit_spec(rng.range(20, 80), rng.range(20, 80)));
  const int blobs = rng.range(1, 6);
  for (int b = 0; b < blobs; ++b)
    add_blob(g, rng.uniform(0, g.spec.grid_w), rng.uniform(0, g.spec.grid_h), rng.uniform(1.5, 8), rng.uniform(0.2, 3));
  for (auto& v : g.cells) v += 0.05 * rng.u01();
  return g;
}

int total_area(const HotSpotMap& m) {
  int a = 0;
  for (const auto& h : m.hotspots) a += h.area_cells;
  return a;
}

double spatial_variance(const HeatGrid& g) {
  double m = 0, sx = 0, sy = 0;
  for (int y = 0; y < g.spec.grid_h; ++y)
    for (int x = 0; x < g.spec.grid_w; ++x) {
      m += g.at(x, y);
      sx += g.at(x, y) * x;
      sy += g.at(x, y) * y;
    }
  sx /= m;
  sy /= m;
  double v = 0;
  for (int y = 0; y < g.spec.grid_h; ++y)
    for (int x = 0; x < g.spec.grid_w; ++x) v += g.at(x, y) * ((x - sx) * (x - sx) + (y - sy) * (y - sy));
  return v / m;
}

}  // namespace

TEST(Maps, CellMapping) {
  const GridSpec s{512, 512, {0, 0, 2048, 2048}, GridKind::Activity};
  EXPECT_EQ(s.cell_of(0, 0), (std::pair{0, 0}));
  EXPECT_EQ(s.cell_of(2048, 2048), (std::pair{511, 511}));
  EXPECT_EQ(s.cell_of(7.99, 8), (std::pair{1, 2}));
  EXPECT_FALSE(s.cell_of(-0.1, 5).has_value());
  EXPECT_FALSE(s.cell_of(5, 2048.5).has_value());
  EXPECT_EQ(s.cell_center(1, 2), (Point2{6, 10}));
}

TEST(Maps, AccumulateBasics) {
  const auto spec = unit_spec(64, 64);
  const auto empty = accumulate({}, spec);
  EXPECT_EQ(empty.sum(), 0);
  std::vector<Point2> same(1000, Point2{10.5, 20.5});
  same.push_back({-1, 5});
  same.push_back({70, 5});
  const auto g = accumulate(same, spec);
  EXPECT_EQ(g.at(10, 20), 1000);
  EXPECT_EQ(g.sum(), 1000);
  EXPECT_EQ(g.dropped, 2);
}

TEST(Maps, AccumulateUniformWithinFiveSigma) {
  Rng rng(5);
  const auto spec = unit_spec(32, 32);
  std::vector<Point2> pts(100000);
  for (auto& p : pts) p = {rng.uniform(0, 32), rng.uniform(0, 32)};
  const auto g = accumulate(pts, spec);
  const double p = 1.0 / (32 * 32), n = 1e5;
  const double mean = n * p, sd = std::sqrt(n * p * (1 - p));
  for (double v : g.cells) EXPECT_LE(std::fabs(v - mean), 5 * sd);
  EXPECT_EQ(g.sum(), 1e5);
}

TEST(Maps, ParallelAccumulationIsBitIdentical) {
  Rng rng(11);
  const GridSpec spec{512, 512, {0, 0, 2048, 2048}, GridKind::Killing};
  std::vector<Point2> pts(50000);
  for (auto& p : pts) p = {rng.uniform(-50, 2100), rng.uniform(-50, 2100)};
  const auto seq = accumulate(pts, spec);
  for (unsigned jobs : {2u, 3u, 8u}) {
    const auto par = accumulate_parallel(pts, spec, jobs);
    EXPECT_EQ(par.cells, seq.cells);
    EXPECT_EQ(par.dropped, seq.dropped);
  }
  EXPECT_THROW(merge(seq, HeatGrid(unit_spec(4, 4))), std::invalid_argument);
}

TEST(Maps, SmoothingKernelAndMass) {
  HeatGrid g(unit_spec(41, 41));
  g.at(20, 20) = 1;
  const auto s = smooth(g, 2.0);
  double norm = 0;
  for (int k = -6; k <= 6; ++k) norm += std::exp(-k * k / 8.0);
  EXPECT_NEAR(s.at(20, 20), 1.0 / (norm * norm), 1e-12);
  EXPECT_NEAR(s.at(20, 20), 1.0 / (2 * M_PI * 4), 1e-4);
  EXPECT_EQ(smooth(g, 0.0).cells, g.cells);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = random_grid(seed);
    r.at(0, 0) += 5;  // mass in a corner exercises the border renormalization
    const double before = r.sum();
    for (double sigma : {0.7, 2.0, 6.5}) EXPECT_NEAR(smooth(r, sigma).sum(), before, 1e-6 * before);
  }
}

TEST(Maps, TwoBlobOracle) {
  HeatGrid g(unit_spec(512, 512));
  add_blob(g, 100, 100, 10, 1);
  add_blob(g, 350, 300, 10, 1);
  const HotSpotParams p;
  const auto m = extract_hotspots(g, p);
  ASSERT_EQ(m.hotspots.size(), 2u);
  EXPECT_EQ(library_components(m), oracle_components(g, p));
  EXPECT_NEAR(m.hotspots[0].centroid.x, 100, 2);
  EXPECT_NEAR(m.hotspots[0].centroid.y, 100, 2);
  EXPECT_NEAR(m.hotspots[1].centroid.x, 350, 2);
  EXPECT_NEAR(m.hotspots[1].centroid.y, 300, 2);
  for (const auto& h : m.hotspots) {
    EXPECT_EQ(contains(m, h.centroid), h.id);
    EXPECT_GE(h.centroid.x, h.bbox.x0);
    EXPECT_LE(h.centroid.x, h.bbox.x1);
    EXPECT_GE(h.area_cells, p.min_area);
  }
  EXPECT_FALSE(contains(m, {250, 480}).has_value());
}

TEST(Maps, DegenerateGrids) {
  EXPECT_TRUE(extract_hotspots(HeatGrid(unit_spec(64, 64))).hotspots.empty());
  HeatGrid small(unit_spec(64, 64));
  add_blob(small, 30, 30, 0.8, 1);
  EXPECT_TRUE(extract_hotspots(small).hotspots.empty());
  // Sparse uniform scatter: every marked cell is isolated, so erosion removes it.
  HeatGrid sparse(unit_spec(64, 64));
  for (int y = 0; y < 64; y += 4)
    for (int x = 0; x < 64; x += 4) sparse.at(x, y) = 1;
  EXPECT_TRUE(extract_hotspots(sparse).hotspots.empty());
  EXPECT_THROW(extract_hotspots(sparse, {0, 1, 2, 16}), std::invalid_argument);
  EXPECT_THROW(extract_hotspots(sparse, {1.5, 1, 2, 16}), std::invalid_argument);
}

TEST(Maps, MorphologyHelpersMatchDefinitions) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const int w = rng.range(5, 40), h = rng.range(5, 40);
    std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * h);
    for (auto& v : m) v = rng.chance(0.6);
    EXPECT_EQ(erode3x3(m, w, h), oracle::morph(m, w, h, true));
    EXPECT_EQ(dilate3x3(m, w, h), oracle::morph(m, w, h, false));
    int count = 0;
    const auto labels = label8(m, w, h, &count);
    const auto comps = oracle::components8(m, w, h);
    EXPECT_EQ(count, static_cast<int>(comps.size()));
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (int i : comps[c]) EXPECT_EQ(labels[i], static_cast<int>(c) + 1);
  }
}

TEST(Maps, RandomGridsAgreeWithOracleAndAreMonotoneAndScaleInvariant) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_grid(100 + seed);
    int prev = std::numeric_limits<int>::max();
    for (int step = 1; step <= 20; ++step) {
      HotSpotParams p;
      p.threshold_frac = step / 20.0;
      p.min_area = 4;
      const auto m = extract_hotspots(g, p);
      const int area = total_area(m);
      EXPECT_LE(area, prev) << "seed " << seed << " step " << step;
      prev = area;
      if (step % 5 == 0) EXPECT_EQ(library_components(m), oracle_components(g, p));
      std::vector<int> owner(g.cells.size(), 0);
      for (const auto& h : m.hotspots) {
        const auto cells = cells_of(h, g.spec.grid_w, g.spec.grid_h);
        EXPECT_EQ(oracle::components8(cells, g.spec.grid_w, g.spec.grid_h).size(), 1u);
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i]) {
            EXPECT_EQ(owner[i], 0);
            owner[i] = h.id;
          }
      }
    }
    const auto base = extract_hotspots(g);
    for (double c : {1e-3, 0.37, 3.0, 1234.5}) {
      HeatGrid scaled = g;
      for (auto& v : scaled.cells) v *= c;
      const auto m = extract_hotspots(scaled);
      ASSERT_EQ(m.hotspots.size(), base.hotspots.size());
      for (std::size_t i = 0; i < m.hotspots.size(); ++i) {
        EXPECT_EQ(m.hotspots[i].cells, base.hotspots[i].cells);
        EXPECT_EQ(m.hotspots[i].area_cells, base.hotspots[i].area_cells);
      }
    }
  }
}

TEST(Maps, BoringSpots) {
  HeatGrid act(unit_spec(200, 200)), kill(unit_spec(200, 200, GridKind::Killing));
  add_blob(act, 50, 50, 6, 1);
  add_blob(act, 150, 150, 6, 1);
  add_blob(kill, 150, 50, 6, 1);
  const auto a = extract_hotspots(act);
  const auto k = extract_hotspots(kill);
  ASSERT_EQ(a.hotspots.size(), 2u);
  EXPECT_EQ(boring_spots(a, k), (std::vector<int>{1, 2}));
  add_blob(kill, 150, 150, 6, 1);
  const auto k2 = extract_hotspots(kill);
  EXPECT_EQ(boring_spots(a, k2), (std::vector<int>{1}));
  EXPECT_THROW(boring_spots(a, extract_hotspots(HeatGrid(unit_spec(10, 10)))), std::invalid_argument);
}

TEST(Maps, TimeSlicing) {
  const auto spec = unit_spec(16, 16);
  std::vector<TimedSample> minute3;
  for (int i = 0; i < 30; ++i) minute3.push_back({1.0 + i % 10, 2.0, 120.0 + i * 3.9});
  const auto w = time_sliced(minute3, 120, spec);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].index, 1);
  EXPECT_EQ(w[0].start_s, 120);
  EXPECT_EQ(w[0].end_s, 240);
  EXPECT_EQ(w[0].grid.sum(), 30);
  EXPECT_TRUE(time_sliced({}, 60, spec).empty());
  EXPECT_THROW(time_sliced(minute3, 0, spec), std::invalid_argument);
}

TEST(Maps, EarlyKillsClusterAndLateKillsDisperse) {
  std::vector<TimedSample> kills;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    ScenarioParams p;
    p.min_duration_s = p.max_duration_s = 1200;
    p.landing = seed % 2 ? LandingStrategy::HotSpotLander : LandingStrategy::Random;
    p.player_class = seed % 2 ? PlayerClass::Experienced : PlayerClass::Beginner;
    const auto s = generate_scenario(seed, p);
    for (const auto& k : s.kills) kills.push_back({k.pos.x, k.pos.y, static_cast<double>(k.t_s - s.game_start_s)});
  }
  const GridSpec spec{256, 256, {0, 0, 2048, 2048}, GridKind::Killing};
  const auto windows = time_sliced(kills, 360, spec);
  ASSERT_GE(windows.size(), 3u);
  const auto sites = default_hot_sites(2048);
  // Early kills sit near the hot sites; later windows spread away from them.
  auto near_share = [&](const TimeWindow& w) {
    double near = 0;
    for (int y = 0; y < 256; ++y)
      for (int x = 0; x < 256; ++x) {
        const auto c = spec.cell_center(x, y);
        for (const auto& s : sites)
          if (std::hypot(c.x - s.x, c.y - s.y) <= 160) {
            near += w.grid.at(x, y);
            break;
          }
      }
    return near / w.grid.sum();
  };
  EXPECT_GT(near_share(windows.front()), 0.9);
  EXPECT_LT(near_share(windows.back()), near_share(windows.front()));
  EXPECT_LT(spatial_variance(windows.front().grid), spatial_variance(windows.back().grid));
}

TEST(Maps, Rendering) {
  HeatGrid zero(unit_spec(64, 64));
  RgbImage bg(128, 128);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) bg.set(x, y, x, y, 77);
  EXPECT_EQ(render(zero, default_palette(), &bg), bg);
  HeatGrid one(unit_spec(8, 8));
  one.at(3, 4) = 5;
  one.at(0, 0) = 1;
  const auto img = render(one);
  const auto last = default_palette().back().rgba;
  EXPECT_EQ(img.at(3, 4)[0], last[0]);
  EXPECT_EQ(img.at(3, 4)[1], last[1]);
  EXPECT_EQ(img.at(3, 4)[2], last[2]);

  HeatGrid two(unit_spec(128, 128));
  add_blob(two, 30, 30, 4, 1);
  add_blob(two, 100, 90, 4, 1);
  const auto r = render(two);
  int near_a = 0, near_b = 0, elsewhere = 0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      const auto* p = r.at(x, y);
      if (p[0] + p[1] + p[2] < 30) continue;
      if (std::hypot(x - 30, y - 30) < 20) ++near_a;
      else if (std::hypot(x - 100, y - 90) < 20) ++near_b;
      else ++elsewhere;
    }
  EXPECT_GT(near_a, 50);
  EXPECT_GT(near_b, 50);
  EXPECT_EQ(elsewhere, 0);
}

TEST(Maps, GridAndHotspotPersistence) {
  testutil::TempDir dir("grid");
  HeatGrid g(GridSpec{128, 96, {10, 20, 522, 404}, GridKind::Landing});
  add_blob(g, 40, 40, 5, 3);
  add_blob(g, 90, 60, 5, 2);
  g.dropped = 3;
  write_grid(dir / "landing.pgm", g);
  EXPECT_EQ(grid_meta_path(dir / "landing.pgm"), dir / "landing.meta");
  const auto text = testutil::slurp(dir / "landing.pgm");
  EXPECT_EQ(text.substr(0, 2), "P5");
  const auto back = read_grid(dir / "landing.pgm");
  EXPECT_EQ(back.spec, g.spec);
  EXPECT_EQ(back.dropped, 3);
  const double mx = g.max();
  for (std::size_t i = 0; i < g.cells.size(); ++i) EXPECT_NEAR(back.cells[i], g.cells[i], mx / 65535.0);

  const auto m = extract_hotspots(g);
  ASSERT_EQ(m.hotspots.size(), 2u);
  write_hotspots(dir / "landing.hotspots.csv", m);
  const auto csv = read_csv(dir / "landing.hotspots.csv");
  EXPECT_EQ(csv.header, kHotspotHeader);
  EXPECT_EQ(csv.rows.size(), 2u);
  const auto hm = read_hotspots(dir / "landing.hotspots.csv");
  EXPECT_EQ(hm.spec, m.spec);
  ASSERT_EQ(hm.hotspots.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(hm.hotspots[i].cells, m.hotspots[i].cells);
    EXPECT_EQ(hm.hotspots[i].id, m.hotspots[i].id);
  }
}
