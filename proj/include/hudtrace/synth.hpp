#pragma once

// Synthetic battle-royale ground truth: a textured map, HUD atlases, per-game
// scenarios (phases, movement, kills, eliminations) and a HUD frame renderer
// that serves as the oracle for the extraction pipeline.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/geometry.hpp"
#include "hudtrace/core/image.hpp"
#include "hudtrace/core/phase.hpp"
#include "hudtrace/derive.hpp"
#include "hudtrace/ingest.hpp"
#include "hudtrace/maps.hpp"
#include "hudtrace/vision.hpp"

namespace hudtrace {

enum class LandingStrategy { EdgeLander, HotSpotLander, Random };
std::string_view strategy_name(LandingStrategy s) noexcept;
std::optional<LandingStrategy> parse_strategy(std::string_view s) noexcept;

// ---- shared assets --------------------------------------------------------

struct WorldParams {
  int map_size = 2048;
  std::uint64_t seed = 2024;
  double margin = 160;  // keeps the minimap window inside the map
};

struct SynthWorld {
  RgbImage map;
  GlyphAtlas glyphs;
  PhaseAtlas phases;
  HudLayout layout;  // resource paths are filled in when written to disk
  std::vector<Point2> hot_sites;
  MapBounds play_bounds;
};

RgbImage make_map_image(int size, std::uint64_t seed);
GlyphAtlas make_glyph_atlas();
PhaseAtlas make_phase_atlas();
// HUD rectangles for a 1920x1080 frame.
HudLayout default_layout();
std::vector<Point2> default_hot_sites(int map_size);
SynthWorld make_world(const WorldParams& params = {});

// Writes map.png, glyphs/, phases/ and layout.txt under `dir`; returns the
// layout path.
std::filesystem::path write_world(const std::filesystem::path& dir, const SynthWorld& world);

// ---- scenarios --------------------------------------------------------------

struct ScenarioParams {
  MapBounds play_bounds{160, 160, 1888, 1888};
  std::vector<Point2> hot_sites = default_hot_sites(2048);
  double hot_radius = 60;
  double edge_band = 150;
  LandingStrategy landing = LandingStrategy::Random;
  PlayerClass player_class = PlayerClass::Beginner;
  int n_players = 100;
  int min_duration_s = 1200;
  int max_duration_s = 1500;
  int lobby_before_s = 15;
  int lobby_after_s = 10;
  int min_jump_s = 20;
  int max_jump_s = 45;
  double jump_speed_max = 30;
  double ground_speed_max = 8;
  double early_kill_s = 360;         // kills before this game time stay near hot sites
  double kill_cluster_radius = 150;  // ... within this distance
  double loiter_radius = 100;        // early movement stays this close to the landing point

  void validate() const;  // throws ConfigError
};

struct PhaseInterval {
  Phase phase;
  int start_s, end_s;  // [start, end)
};
struct KillEvent {
  int t_s;
  Point2 pos;
};
struct Elimination {
  int t_s;
  int remaining;
};
struct Outcome {
  bool won = false;
  int t_s = 0;
  Point2 pos;
};

struct Scenario {
  std::uint64_t seed = 0;
  ScenarioParams params;
  int game_start_s = 0;  // first Jump second
  int game_end_s = 0;    // exclusive; the outcome second is game_end_s - 1
  int stream_length_s = 0;
  Point2 landing;
  std::vector<Point2> path;  // one position per second of [game_start_s, game_end_s)
  std::vector<PhaseInterval> schedule;
  std::vector<KillEvent> kills;
  std::vector<Elimination> eliminations;  // strictly decreasing `remaining`
  Outcome outcome;

  [[nodiscard]] Phase phase_at(int t) const;
  [[nodiscard]] bool in_game(int t) const { return t >= game_start_s && t < game_end_s; }
  [[nodiscard]] std::optional<Point2> position_at(int t) const;
  [[nodiscard]] int players_at(int t) const;
  [[nodiscard]] int kills_at(int t) const;
  [[nodiscard]] int place() const { return players_at(outcome.t_s); }
  [[nodiscard]] int duration_s() const { return game_end_s - game_start_s; }
};

Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& params);
// Throws InvariantError naming the first violated scenario invariant.
void check_scenario(const Scenario& s);
// Stable text form used for determinism checks.
std::string serialize_scenario(const Scenario& s);

// ---- rendering ---------------------------------------------------------------

struct RenderParams {
  double noise_sigma = 0;
  double occlusion_rate = 0;  // fraction of in-game frames whose minimap is covered
  std::uint64_t noise_seed = 0;
};

struct TruthRow {
  int t_s = 0;
  Phase phase = Phase::Lobby;
  std::optional<Point2> pos;
  std::optional<int> players, kills;
  bool occluded = false;
};

class ScenarioRenderer {
 public:
  ScenarioRenderer(const Scenario& scenario, const SynthWorld& world, RenderParams params = {});
  [[nodiscard]] int frame_count() const noexcept { return scenario_.stream_length_s; }
  [[nodiscard]] bool occluded(int t) const;
  [[nodiscard]] TruthRow truth(int t) const;
  [[nodiscard]] std::vector<TruthRow> truth_rows() const;
  [[nodiscard]] RgbImage render(int t) const;

 private:
  const Scenario& scenario_;
  const SynthWorld& world_;
  RenderParams params_;
  RgbImage backdrop_;
  PixelRect minimap_, icon_, kills_, players_;
};

// 1 fps stream rendered lazily; the renderer must outlive the stream.
std::unique_ptr<FrameStream> render_frames(const ScenarioRenderer& renderer, std::string source_id);

extern const std::vector<std::string> kTruthHeader;
void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows);
std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path);

// ---- corpora ------------------------------------------------------------------

struct CorpusParams {
  int n_games = 10;
  std::uint64_t base_seed = 1;
  double beginner_fraction = 0.5;
  double hotspot_share = 0.6;  // experienced players landing on hot sites; rest land on edges
  ScenarioParams scenario;     // landing / class fields are set per game
  RenderParams render;
  WorldParams world;
};

struct CorpusEntry {
  std::string source_id;
  std::string game_id;
  PlayerClass player_class = PlayerClass::Beginner;
  LandingStrategy strategy = LandingStrategy::Random;
  std::uint64_t seed = 0;
  ScenarioParams params;
};

std::vector<CorpusEntry> plan_corpus(const CorpusParams& params);

struct ManifestRow {
  std::string game_id;
  PlayerClass player_class;
  std::uint64_t seed;
  int duration_s;
};
extern const std::vector<std::string> kManifestHeader;
void write_manifest(std::ostream& out, const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

// Layout: <dir>/assets/..., <dir>/manifest.csv, <dir>/games/<source_id>/
// {stream.meta, frame_%08d.png, truth.csv}. Games render in parallel.
void emit_corpus(const std::filesystem::path& dir, const CorpusParams& params, unsigned jobs = 1);

}  // namespace hudtrace
