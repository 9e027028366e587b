#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace hudtrace {

enum class Phase { Lobby, Jump, StormBrewing, Contraction, Unknown };

inline constexpr std::array<Phase, 4> kKnownPhases = {Phase::Lobby, Phase::Jump,
                                                      Phase::StormBrewing, Phase::Contraction};

[[nodiscard]] constexpr std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::Lobby: return "lobby";
    case Phase::Jump: return "jump";
    case Phase::StormBrewing: return "storm_brewing";
    case Phase::Contraction: return "contraction";
    case Phase::Unknown: break;
  }
  return "unknown";
}

[[nodiscard]] inline std::optional<Phase> parse_phase(std::string_view s) noexcept {
  for (Phase p : {Phase::Lobby, Phase::Jump, Phase::StormBrewing, Phase::Contraction,
                  Phase::Unknown}) {
    if (phase_name(p) == s) return p;
  }
  return std::nullopt;
}

// Jump, StormBrewing and Contraction are the phases of a running game.
[[nodiscard]] constexpr bool in_game(Phase p) noexcept {
  return p == Phase::Jump || p == Phase::StormBrewing || p == Phase::Contraction;
}

}  // namespace hudtrace
