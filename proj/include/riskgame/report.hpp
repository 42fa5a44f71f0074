#pragma once

#include <string>
#include <vector>

#include "riskgame/game.hpp"
#include "riskgame/riskops.hpp"

namespace riskgame::io {

/// Human-readable equilibrium report. Deterministic: the same inputs render
/// byte-identical text. category_labels, when given, adds a cosmetic legend
/// (category number -> name) at the end.
std::string render_report(const EquilibriumReport& report, const Equilibrium& eq,
                          const std::vector<std::string>& defense_labels,
                          const std::vector<std::string>& category_labels = {});

}  // namespace riskgame::io
