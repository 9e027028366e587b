#include <cmath>
#include <gtest/gtest.h>

#include <fstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/pipeline.hpp"
#include "hudtrace/synth.hpp"
#include "test_util.hpp"

using namespace hudtrace;
namespace fs = std::filesystem;

namespace {

// Three short games rendered once per test binary.
const fs::path& small_corpus() {
  static testutil::TempDir dir("pipe_corpus");
  static bool done = false;
  if (!done) {
    CorpusParams cp;
    cp.n_games = 3;
    cp.scenario.min_duration_s = 90;
    cp.scenario.max_duration_s = 110;
    cp.scenario.max_jump_s = 40;
    emit_corpus(dir.path(), cp, 1);
    done = true;
  }
  return dir.path();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_grid_with_blobs(const fs::path& pgm, GridKind kind, std::vector<Point2> centres) {
  HeatGrid g(GridSpec{128, 128, {0, 0, 2048, 2048}, kind});
  for (const auto& c : centres)
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x) g.at(x, y) += std::exp(-((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y)) / 30.0);
  write_grid(pgm, g);
}

}  // namespace

TEST(Pipeline, ConfigLoadsKnownKeysAndRejectsOthers) {
  testutil::TempDir dir("cfg");
  const auto layout = write_world(dir / "assets", testutil::world());
  std::ofstream(dir / "ok.conf") << "layout=assets/layout.txt\nsample_rate=1\nhotspot.threshold_frac=0.3\n"
                                    "grid.w=256\nfilter.v_max=35\nlocator.candidates=8\n";
  const auto cfg = PipelineConfig::load(dir / "ok.conf");
  EXPECT_EQ(fs::weakly_canonical(cfg.layout), fs::weakly_canonical(layout));
  EXPECT_DOUBLE_EQ(cfg.hotspots.threshold_frac, 0.3);
  EXPECT_EQ(cfg.grid.grid_w, 256);
  EXPECT_DOUBLE_EQ(cfg.filter.v_max, 35);
  EXPECT_EQ(cfg.extraction.locator.candidates, 8);
  EXPECT_FALSE(format_config(cfg).empty());

  std::ofstream(dir / "bad.conf") << "layout=assets/layout.txt\nhotspot.threshhold=0.3\n";
  try {
    PipelineConfig::load(dir / "bad.conf");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("hotspot.threshhold"), std::string::npos);
  }
  std::ofstream(dir / "missing.conf") << "layout=nowhere.txt\n";
  EXPECT_THROW(PipelineConfig::load(dir / "missing.conf"), Error);
}

TEST(Pipeline, ExpandSourcesSortsCorpusGames) {
  const auto srcs = expand_sources({small_corpus().string()});
  ASSERT_EQ(srcs.size(), 3u);
  EXPECT_TRUE(std::is_sorted(srcs.begin(), srcs.end()));
}

TEST(Cli, ExtractRowCountsMatchDurations) {
  testutil::TempDir out("cli_extract");
  const auto& c = small_corpus();
  ASSERT_EQ(testutil::run_cli("--out " + q(out.path()) + " extract --layout " + q(c / "assets/layout.txt") + " " +
                                  q(c / "games"),
                              out / "log.txt"),
            0)
      << testutil::slurp(out / "log.txt");
  for (const auto& m : read_manifest(c / "manifest.csv")) {
    const std::string source = m.game_id.substr(0, m.game_id.rfind("-g"));
    const auto t = read_csv(out / (source + ".telemetry.csv"));
    EXPECT_LE(std::abs(static_cast<long>(t.rows.size()) - m.duration_s), 1) << m.game_id;
  }
}

TEST(Cli, ExitCodes) {
  testutil::TempDir dir("cli_codes");
  const auto& c = small_corpus();
  fs::create_directories(dir / "empty");
  EXPECT_EQ(testutil::run_cli("--out " + q(dir.path()) + " extract --fps 30 --layout " + q(c / "assets/layout.txt") +
                                  " " + q(dir / "empty"),
                              dir / "log1.txt"),
            2);
  EXPECT_NE(testutil::slurp(dir / "log1.txt").find("no frames found"), std::string::npos);

  std::ofstream(dir / "bad_layout.txt") << testutil::slurp(c / "assets/layout.txt") << "minimap.zoom=2\n";
  EXPECT_EQ(testutil::run_cli("--out " + q(dir.path()) + " extract --layout " + q(dir / "bad_layout.txt") + " " +
                                  q(c / "games"),
                              dir / "log2.txt"),
            3);
  EXPECT_NE(testutil::slurp(dir / "log2.txt").find("minimap.zoom"), std::string::npos);

  EXPECT_EQ(testutil::run_cli("--bogus-flag", dir / "log3.txt"), 3);
  EXPECT_EQ(testutil::run_cli("--help", dir / "log4.txt"), 0);
  EXPECT_EQ(testutil::run_cli("derive " + q(dir / "nope.csv"), dir / "log5.txt"), 2);
}

TEST(Cli, DeriveWithoutGamesWritesEmptyRecords) {
  testutil::TempDir dir("cli_derive");
  std::ofstream(dir / "t.telemetry.csv") << "game_id,t_s,phase,x,y,pos_score,players,kills,flag\n";
  ASSERT_EQ(testutil::run_cli("--out " + q(dir.path()) + " derive " + q(dir / "t.telemetry.csv"), dir / "log.txt"), 0);
  EXPECT_TRUE(read_csv(dir / "records.csv").rows.empty());
  EXPECT_NE(testutil::slurp(dir / "log.txt").find("no games"), std::string::npos);
}

TEST(Cli, HotspotsFromGrids) {
  testutil::TempDir dir("cli_hot");
  write_grid_with_blobs(dir / "activity.pgm", GridKind::Activity, {{30, 30}, {90, 90}});
  write_grid_with_blobs(dir / "killing.pgm", GridKind::Killing, {{30, 95}});
  HeatGrid zero(GridSpec{64, 64, {0, 0, 2048, 2048}, GridKind::Activity});
  write_grid(dir / "zero.pgm", zero);
  ASSERT_EQ(testutil::run_cli("--out " + q(dir.path()) + " hotspots " + q(dir / "activity.pgm") + " --killing " +
                                  q(dir / "killing.pgm"),
                              dir / "log.txt"),
            0)
      << testutil::slurp(dir / "log.txt");
  EXPECT_EQ(read_csv(dir / "activity.hotspots.csv").rows.size(), 2u);
  EXPECT_EQ(read_csv(dir / "boring.csv").rows.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "activity.hotspots.png"));
  ASSERT_EQ(testutil::run_cli("--out " + q(dir.path()) + " hotspots " + q(dir / "zero.pgm"), dir / "log2.txt"), 0);
  EXPECT_TRUE(read_csv(dir / "zero.hotspots.csv").rows.empty());
}

TEST(Cli, HeatmapsAndCorrelate) {
  testutil::TempDir dir("cli_maps");
  std::ofstream(dir / "records.csv")
      << "game_id,class,start_s,end_s,duration_s,place,kills,landing_x,landing_y,death_x,death_y,win_x,win_y,"
         "jump_s,brew_s,contract_s,dropped_kills\n"
         "a-g01,experienced,0,100,100,10,1,200,200,210,210,,,20,80,0,0\n"
         "b-g01,experienced,0,110,110,5,3,220,180,300,300,,,20,90,0,0\n"
         "c-g01,experienced,0,120,120,40,0,1500,1500,1500,1500,,,20,100,0,0\n"
         "d-g01,experienced,0,130,130,1,4,230,230,,,260,260,20,110,0,0\n";
  std::ofstream(dir / "kills.csv") << "game_id,t_s,x,y\na-g01,130,210,210\nb-g01,300,250,250\nb-g01,310,260,250\n";
  std::ofstream(dir / "traces.csv") << "game_id,t_s,x,y,flag\na-g01,0,200,200,raw\n";
  const std::string base = "--out " + q(dir.path()) + " heatmap --records " + q(dir / "records.csv");
  ASSERT_EQ(testutil::run_cli(base + " --kind landing", dir / "l1.txt"), 0) << testutil::slurp(dir / "l1.txt");
  EXPECT_TRUE(fs::exists(dir / "landing.pgm"));
  EXPECT_TRUE(fs::exists(dir / "landing.png"));
  ASSERT_EQ(testutil::run_cli(base + " --kind landing --class beginner", dir / "l2.txt"), 0);
  EXPECT_NE(testutil::slurp(dir / "l2.txt").find("empty selection"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "landing_beginner.png"));
  ASSERT_EQ(testutil::run_cli(base + " --kind killing --kills " + q(dir / "kills.csv") + " --window 120", dir / "l3.txt"),
            0);
  EXPECT_TRUE(fs::exists(dir / "killing_w1.png"));
  EXPECT_TRUE(fs::exists(dir / "killing_w2.png"));
  EXPECT_FALSE(fs::exists(dir / "killing_w0.png"));

  std::ofstream(dir / "survey.csv")
      << "participant_id,game_id,satisfaction,enjoyment,strategy,hours_gaming_per_week,fortnite_watch_hours\n"
         "p1,a-g01,2,2,x,3,3\np2,b-g01,3,4,x,3,3\np3,c-g01,4,5,x,3,3\np4,zz-g01,3,3,x,3,3\n";
  ASSERT_EQ(testutil::run_cli("--out " + q(dir.path()) + " correlate --records " + q(dir / "records.csv") +
                                  " --survey " + q(dir / "survey.csv") +
                                  " --pairs satisfaction:enjoyment,hours_gaming_per_week:place",
                              dir / "c.txt"),
            0)
      << testutil::slurp(dir / "c.txt");
  const auto text = testutil::slurp(dir / "report.txt");
  EXPECT_NE(text.find("zz-g01"), std::string::npos);
  EXPECT_NE(text.find("d-g01"), std::string::npos);
  const auto csv = read_csv(dir / "report.csv");
  ASSERT_EQ(csv.rows.size(), 2u);
  EXPECT_EQ(csv.rows[0][2], "1.000000");
  EXPECT_EQ(csv.rows[1][5], "undefined");
}
