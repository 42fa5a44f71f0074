#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "riskgame/apt.hpp"
#include "riskgame/game.hpp"
#include "riskgame/loss_distribution.hpp"
#include "riskgame/preference.hpp"
#include "riskgame/riskops.hpp"

namespace riskgame::io {

using json = nlohmann::json;

// JSON codecs. Schemas are stable; loaders validate and throw
// riskgame::error with context on malformed input.
json to_json(const LossDistribution& d);
LossDistribution loss_distribution_from_json(const json& j);

json to_json(const Game& g);
Game game_from_json(const json& j);

json to_json(const Equilibrium& eq);
Equilibrium equilibrium_from_json(const json& j);

json to_json(const AttackGraph& g);
AttackGraph attack_graph_from_json(const json& j);

json to_json(const PreferenceResult& r);

json to_json(const Schedule& s);
Schedule schedule_from_json(const json& j);

json to_json(const RateTestResult& r);

json to_json(const ThreatRanking& r);

json to_json(const EquilibriumReport& r);

/// APT scenario config: stage dynamics plus solver parameters.
struct AptScenario {
  std::vector<StageDynamics<double>> stages;
  LossDistribution initial;
  Eigen::Index fp_iterations{1000};
  double fixpoint_tol{1e-6};
  int max_fixpoint_rounds{100};
};

json to_json(const AptScenario& s);
AptScenario apt_scenario_from_json(const json& j);

json load_json_file(const std::filesystem::path& path);

/// Writes via a temp file in the same directory and renames into place, so a
/// failing run never leaves a partial output file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Two-column plot data: one "category mass" line per category.
std::string plot_data(const LossDistribution& d);
void write_plot_data(const std::filesystem::path& path, const LossDistribution& d);

}  // namespace riskgame::io
