#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/random.hpp"
#include "hudtrace/synth.hpp"

namespace hudtrace {

void ScenarioParams::validate() const {
  if (!(play_bounds.x1 > play_bounds.x0 && play_bounds.y1 > play_bounds.y0)) throw ConfigError("empty play bounds");
  if (n_players < 2 || n_players > kMaxPlayers) throw ConfigError("n_players must lie in 2..100");
  if (min_duration_s < 61 || max_duration_s < min_duration_s) throw ConfigError("bad game duration range");
  if (min_jump_s < 2 || max_jump_s < min_jump_s || max_jump_s * 2 > min_duration_s) throw ConfigError("bad jump range");
  if (lobby_before_s < 0 || lobby_after_s < 0) throw ConfigError("negative lobby time");
  if (!(jump_speed_max > 0 && ground_speed_max > 2)) throw ConfigError("bad speed limits");
  if (!(edge_band > 0) || !(hot_radius >= 0)) throw ConfigError("bad landing geometry");
  if (landing == LandingStrategy::HotSpotLander && hot_sites.empty()) throw ConfigError("no hot sites configured");
}

Phase Scenario::phase_at(int t) const {
  for (const auto& p : schedule) {
    if (t >= p.start_s && t < p.end_s) return p.phase;
  }
  return Phase::Lobby;
}

std::optional<Point2> Scenario::position_at(int t) const {
  if (!in_game(t)) return std::nullopt;
  return path[static_cast<std::size_t>(t - game_start_s)];
}

int Scenario::players_at(int t) const {
  int remaining = params.n_players;
  for (const auto& e : eliminations) {
    if (e.t_s > t) break;
    remaining = e.remaining;
  }
  return remaining;
}

int Scenario::kills_at(int t) const {
  int n = 0;
  for (const auto& k : kills) n += k.t_s <= t;
  return n;
}

namespace {

Point2 clamp_to(const MapBounds& b, Point2 p) {
  return {std::clamp(p.x, b.x0, b.x1), std::clamp(p.y, b.y0, b.y1)};
}

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point2 pick_landing(const ScenarioParams& p, Rng& rng) {
  const auto& b = p.play_bounds;
  switch (p.landing) {
    case LandingStrategy::Random:
      return {rng.uniform(b.x0, b.x1), rng.uniform(b.y0, b.y1)};
    case LandingStrategy::EdgeLander: {
      const int side = rng.range(0, 3);
      const double inward = rng.uniform(0, p.edge_band * 0.999);
      if (side == 0) return {rng.uniform(b.x0, b.x1), b.y0 + inward};
      if (side == 1) return {rng.uniform(b.x0, b.x1), b.y1 - inward};
      if (side == 2) return {b.x0 + inward, rng.uniform(b.y0, b.y1)};
      return {b.x1 - inward, rng.uniform(b.y0, b.y1)};
    }
    case LandingStrategy::HotSpotLander: {
      const Point2 site = p.hot_sites[static_cast<std::size_t>(rng.range(0, static_cast<int>(p.hot_sites.size()) - 1))];
      const double r = p.hot_radius * std::sqrt(rng.u01());
      const double a = rng.uniform(0, 6.283185307179586);
      return clamp_to(b, {site.x + r * std::cos(a), site.y + r * std::sin(a)});
    }
  }
  return {b.x0, b.y0};
}

int poisson(Rng& rng, double lambda) {
  const double limit = std::exp(-lambda);
  double prod = rng.u01();
  int k = 0;
  while (prod > limit && k < 1000) {
    prod *= rng.u01();
    ++k;
  }
  return k;
}

double nearest_site(const std::vector<Point2>& sites, Point2 p) {
  double best = 1e300;
  for (const auto& s : sites) best = std::min(best, dist(s, p));
  return best;
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& params) {
  params.validate();
  Rng rng(seed);
  Scenario s;
  s.seed = seed;
  s.params = params;

  const int lobby = params.lobby_before_s;
  const int jump = rng.range(params.min_jump_s, params.max_jump_s);
  const int duration = rng.range(params.min_duration_s, params.max_duration_s);
  s.game_start_s = lobby;
  s.game_end_s = lobby + duration;
  s.stream_length_s = s.game_end_s + params.lobby_after_s;
  const int t_land = lobby + jump;
  const int t_out = s.game_end_s - 1;

  const double skill = params.player_class == PlayerClass::Beginner ? rng.uniform(0.0, 0.6) : rng.uniform(0.4, 1.0);
  const auto& bounds = params.play_bounds;

  // Glide from the drop point to the landing point.
  s.landing = pick_landing(params, rng);
  const double heading = rng.uniform(0, 6.283185307179586);
  const double reach = rng.uniform(0.3, 1.0) * params.jump_speed_max * jump;
  const Point2 drop = clamp_to(bounds, {s.landing.x + reach * std::cos(heading), s.landing.y + reach * std::sin(heading)});
  for (int t = lobby; t < t_land; ++t) {
    const double f = static_cast<double>(t - lobby) / jump;
    s.path.push_back({drop.x + f * (s.landing.x - drop.x), drop.y + f * (s.landing.y - drop.y)});
  }

  // Ground movement: piecewise-constant velocity towards random waypoints.
  Point2 pos = s.landing;
  s.path.push_back(pos);
  int t = t_land;
  while (t < t_out) {
    const bool early = t - lobby < params.early_kill_s;
    const Point2 centre = early ? s.landing : pos;
    const double radius = early ? params.loiter_radius : 350.0;
    const double r = radius * std::sqrt(rng.u01());
    const double a = rng.uniform(0, 6.283185307179586);
    const Point2 target = clamp_to(bounds, {centre.x + r * std::cos(a), centre.y + r * std::sin(a)});
    const double speed = rng.uniform(2.0, params.ground_speed_max);
    while (t < t_out && dist(pos, target) > 1e-9) {
      const double d = dist(pos, target);
      const double step = std::min(speed, d);
      pos = {pos.x + (target.x - pos.x) * step / d, pos.y + (target.y - pos.y) * step / d};
      s.path.push_back(pos);
      ++t;
    }
    if (rng.chance(0.3)) {
      for (int k = rng.range(2, 10); k > 0 && t < t_out; --k) {
        s.path.push_back(pos);
        ++t;
      }
    }
  }

  // Phases.
  s.schedule.push_back({Phase::Lobby, 0, lobby});
  s.schedule.push_back({Phase::Jump, lobby, t_land});
  bool brewing = true;
  for (int a = t_land; a < s.game_end_s;) {
    const int len = brewing ? rng.range(60, 150) : rng.range(45, 120);
    const int b = std::min(s.game_end_s, a + len);
    s.schedule.push_back({brewing ? Phase::StormBrewing : Phase::Contraction, a, b});
    brewing = !brewing;
    a = b;
  }
  s.schedule.push_back({Phase::Lobby, s.game_end_s, s.stream_length_s});
  s.schedule.erase(std::remove_if(s.schedule.begin(), s.schedule.end(),
                                  [](const PhaseInterval& p) { return p.end_s <= p.start_s; }),
                   s.schedule.end());

  // Outcome, kills and eliminations.
  const int n = params.n_players;
  const int place = std::clamp(1 + static_cast<int>(std::floor((n - 1) * std::pow(rng.u01(), 1 + 2 * skill))), 1, n);
  const int n_elim = n - place;
  const double lambda = 0.3 + 7 * skill * (1 - static_cast<double>(place - 1) / (n - 1));
  const int first_kill_t = t_land + 3, last_kill_t = t_out - 1;
  const int kill_slots = std::max(0, last_kill_t - first_kill_t + 1);
  const int n_kills = std::min({poisson(rng, lambda), n_elim, kMaxKills, kill_slots});
  std::set<int> kill_times;
  const int late_from = std::max(first_kill_t, lobby + static_cast<int>(std::ceil(params.early_kill_s)));
  for (int attempt = 0; static_cast<int>(kill_times.size()) < n_kills; ++attempt) {
    int kt = rng.range(first_kill_t, last_kill_t);
    const bool early = kt - lobby < params.early_kill_s;
    // Early kills happen near hot sites; give up on the rule for games too short to honour it.
    if (early && attempt < 10000 &&
        nearest_site(params.hot_sites, *s.position_at(kt)) > params.kill_cluster_radius) {
      if (late_from > last_kill_t) continue;
      kt = rng.range(late_from, last_kill_t);
    }
    kill_times.insert(kt);
  }
  for (int kt : kill_times) s.kills.push_back({kt, *s.position_at(kt)});

  std::vector<int> elim_times(kill_times.begin(), kill_times.end());
  for (int i = n_kills; i < n_elim; ++i) elim_times.push_back(rng.range(t_land + 1, t_out));
  std::sort(elim_times.begin(), elim_times.end());
  int remaining = n;
  for (std::size_t i = 0; i < elim_times.size(); ++i) {
    --remaining;
    if (i + 1 == elim_times.size() || elim_times[i + 1] != elim_times[i]) {
      s.eliminations.push_back({elim_times[i], remaining});
    }
  }
  s.outcome = {place == 1, t_out, s.path.back()};
  check_scenario(s);
  return s;
}

void check_scenario(const Scenario& s) {
  auto fail = [](const std::string& what) { throw InvariantError("scenario invariant violated: " + what); };
  const auto& p = s.params;
  if (s.path.size() != static_cast<std::size_t>(s.duration_s())) fail("path length differs from game duration");
  if (s.duration_s() < p.min_duration_s || s.duration_s() > p.max_duration_s) fail("duration outside range");
  if (s.schedule.empty()) fail("empty phase schedule");
  std::size_t i = 0;
  if (s.schedule[0].phase == Phase::Lobby) ++i;
  if (i >= s.schedule.size() || s.schedule[i].phase != Phase::Jump || s.schedule[i].start_s != s.game_start_s) {
    fail("schedule must start Lobby then Jump");
  }
  for (std::size_t k = 1; k < s.schedule.size(); ++k) {
    if (s.schedule[k].start_s != s.schedule[k - 1].end_s) fail("schedule has gaps");
  }
  Phase last = Phase::Jump;
  for (++i; i < s.schedule.size() && s.schedule[i].phase != Phase::Lobby; ++i) {
    const Phase ph = s.schedule[i].phase;
    if (ph != Phase::StormBrewing && ph != Phase::Contraction) fail("unexpected in-game phase");
    if (last != Phase::Jump && ph == last) fail("storm phases must alternate");
    if (last == Phase::Jump && ph != Phase::StormBrewing) fail("storm brewing must follow the jump");
    last = ph;
  }
  if (s.schedule[i - 1].end_s != s.game_end_s) fail("in-game phases must end with the game");
  int prev = p.n_players;
  for (const auto& e : s.eliminations) {
    if (e.remaining >= prev || e.remaining < 1) fail("remaining players must strictly decrease");
    if (e.t_s <= s.game_start_s || e.t_s >= s.game_end_s) fail("elimination outside the game");
    prev = e.remaining;
  }
  if (s.place() != prev) fail("final elimination does not match the outcome");
  if (s.outcome.won != (prev == 1)) fail("win flag disagrees with remaining players");
  if (static_cast<int>(s.kills.size()) > p.n_players - s.place()) fail("more kills than eliminations");
  for (const auto& k : s.kills) {
    const auto at = s.position_at(k.t_s);
    if (!at || at->x != k.pos.x || at->y != k.pos.y) fail("kill position off the path");
  }
  const int t_land = s.game_start_s + (s.schedule[s.schedule[0].phase == Phase::Lobby ? 1 : 0].end_s - s.game_start_s);
  for (std::size_t k = 0; k < s.path.size(); ++k) {
    if (!p.play_bounds.contains(s.path[k].x, s.path[k].y)) fail("path leaves the play bounds");
    if (k == 0) continue;
    const double v = std::hypot(s.path[k].x - s.path[k - 1].x, s.path[k].y - s.path[k - 1].y);
    const bool ground = static_cast<int>(k) + s.game_start_s > t_land;
    if (v > (ground ? p.ground_speed_max : p.jump_speed_max) + 1e-9) fail("speed limit exceeded");
  }
  if (s.outcome.pos.x != s.path.back().x || s.outcome.pos.y != s.path.back().y) fail("outcome position off the path");
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream o;
  o << "seed=" << s.seed << " start=" << s.game_start_s << " end=" << s.game_end_s << " stream=" << s.stream_length_s
    << " landing=" << fmt_fixed(s.landing.x, 6) << "," << fmt_fixed(s.landing.y, 6) << "\n";
  for (const auto& p : s.schedule) o << "phase " << phase_name(p.phase) << " " << p.start_s << " " << p.end_s << "\n";
  for (std::size_t i = 0; i < s.path.size(); ++i) {
    o << "pos " << s.game_start_s + static_cast<int>(i) << " " << fmt_fixed(s.path[i].x, 6) << " "
      << fmt_fixed(s.path[i].y, 6) << "\n";
  }
  for (const auto& k : s.kills) o << "kill " << k.t_s << "\n";
  for (const auto& e : s.eliminations) o << "elim " << e.t_s << " " << e.remaining << "\n";
  o << "outcome " << (s.outcome.won ? "win" : "death") << " " << s.outcome.t_s << "\n";
  return o.str();
}

}  // namespace hudtrace
