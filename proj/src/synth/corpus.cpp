#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/core/log.hpp"
#include "hudtrace/core/parallel.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/core/random.hpp"
#include "hudtrace/synth.hpp"

namespace hudtrace {

namespace fs = std::filesystem;

std::vector<CorpusEntry> plan_corpus(const CorpusParams& params) {
  if (params.n_games < 1) throw ConfigError("corpus needs at least one game");
  if (params.beginner_fraction < 0 || params.beginner_fraction > 1) throw ConfigError("class mix must lie in [0, 1]");
  std::vector<CorpusEntry> out;
  for (int i = 0; i < params.n_games; ++i) {
    CorpusEntry e;
    char id[32];
    std::snprintf(id, sizeof id, "synth-%04d", i);
    e.source_id = id;
    e.game_id = make_game_id(e.source_id, 1);
    e.seed = mix_seed(params.base_seed, static_cast<std::uint64_t>(i));
    // Spread beginners evenly: game i is a beginner when floor((i+1)f) steps.
    const bool beginner = std::floor((i + 1) * params.beginner_fraction) > std::floor(i * params.beginner_fraction);
    e.player_class = beginner ? PlayerClass::Beginner : PlayerClass::Experienced;
    if (beginner) {
      e.strategy = LandingStrategy::Random;
    } else {
      Rng rng(mix_seed(e.seed, 0x7374726174ull));
      e.strategy = rng.chance(params.hotspot_share) ? LandingStrategy::HotSpotLander : LandingStrategy::EdgeLander;
    }
    e.params = params.scenario;
    e.params.player_class = e.player_class;
    e.params.landing = e.strategy;
    out.push_back(std::move(e));
  }
  return out;
}

const std::vector<std::string> kManifestHeader = {"game_id", "class", "seed", "duration_s"};

void write_manifest(std::ostream& out, const std::vector<ManifestRow>& rows) {
  CsvWriter w(out);
  w.row(kManifestHeader);
  for (const auto& r : rows) {
    w.row({r.game_id, std::string(class_name(r.player_class)), std::to_string(r.seed), std::to_string(r.duration_s)});
  }
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  const auto table = read_csv(path);
  require_header(table, kManifestHeader, path.string());
  std::vector<ManifestRow> rows;
  for (const auto& f : table.rows) {
    const auto cls = parse_class(f[1]);
    if (!cls) throw InputError(path.string() + ": unknown class '" + f[1] + "'");
    try {
      rows.push_back({f[0], *cls, std::stoull(f[2]), static_cast<int>(parse_long(f[3]))});
    } catch (const std::exception&) {
      throw InputError(path.string() + ": bad numeric field for " + f[0]);
    }
  }
  return rows;
}

void emit_corpus(const fs::path& dir, const CorpusParams& params, unsigned jobs) {
  const SynthWorld world = make_world(params.world);
  CorpusParams p = params;
  p.scenario.play_bounds = world.play_bounds;
  p.scenario.hot_sites = world.hot_sites;
  const auto plan = plan_corpus(p);

  fs::create_directories(dir / "games");
  write_world(dir / "assets", world);

  std::vector<ManifestRow> rows(plan.size());
  parallel_for(plan.size(), jobs, [&](std::size_t i) {
    const CorpusEntry& e = plan[i];
    const Scenario s = generate_scenario(e.seed, e.params);
    RenderParams rp = p.render;
    rp.noise_seed = mix_seed(p.render.noise_seed, e.seed);
    const ScenarioRenderer renderer(s, world, rp);
    const fs::path gdir = dir / "games" / e.source_id;
    fs::create_directories(gdir);
    write_stream_meta(gdir / "stream.meta", {Rational(1), e.source_id});
    for (int t = 0; t < renderer.frame_count(); ++t) write_png(gdir / frame_file_name(t), renderer.render(t), 1);
    std::ostringstream truth;
    write_truth_csv(truth, renderer.truth_rows());
    write_text_file(gdir / "truth.csv", truth.str());
    rows[i] = {e.game_id, e.player_class, e.seed, s.duration_s()};
    log_info("rendered " + e.source_id + " (" + std::to_string(renderer.frame_count()) + " frames)");
  });
  std::ostringstream manifest;
  write_manifest(manifest, rows);
  write_text_file(dir / "manifest.csv", manifest.str());
}

}  // namespace hudtrace
