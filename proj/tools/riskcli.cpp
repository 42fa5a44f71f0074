// Command-line front end for the distribution-valued risk toolkit: survey
// ingestion, kernel smoothing, preference decisions, equilibrium solving,
// APT analysis, control selection, action scheduling and the rate test.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "riskgame/apt.hpp"
#include "riskgame/csv.hpp"
#include "riskgame/game.hpp"
#include "riskgame/io.hpp"
#include "riskgame/preference.hpp"
#include "riskgame/report.hpp"
#include "riskgame/riskops.hpp"

namespace fs = std::filesystem;
using riskgame::errc;
using riskgame::error;
using json = riskgame::io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// Flat JSON config: keys are the long option names. Command-line flags win;
// the config only fills options the user did not pass.
struct ConfigOverlay {
  json values = json::object();
  std::vector<std::function<void()>> appliers;

  void load(const std::string& path) {
    if (path.empty()) return;
    values = riskgame::io::load_json_file(path);
    if (!values.is_object()) riskgame::fail(errc::invalid_argument, "config must be a flat JSON object");
  }
  template <typename T>
  void wire(CLI::Option* opt, T& bound, const std::string& key) {
    appliers.push_back([this, opt, &bound, key] {
      if (opt->count() == 0 && values.contains(key)) bound = values.at(key).get<T>();
    });
  }
  void apply() {
    for (auto& f : appliers) f();
  }
  std::vector<std::string> category_labels() const {
    if (!values.contains("category-labels")) return {};
    return values.at("category-labels").get<std::vector<std::string>>();
  }
};

void require_value(const std::string& value, const char* flag) {
  if (value.empty()) {
    std::cerr << "error: missing required option " << flag << "\n";
    std::exit(kExitUsage);
  }
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<double> parse_weights(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_list(csv)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      riskgame::fail(errc::invalid_weights, "weight '" + item + "' is not a number");
    }
  }
  return out;
}

std::vector<riskgame::LossDistribution> load_distributions(const std::string& csv_paths) {
  std::vector<riskgame::LossDistribution> out;
  for (const auto& path : split_list(csv_paths))
    out.push_back(riskgame::io::loss_distribution_from_json(riskgame::io::load_json_file(path)));
  return out;
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

// "none", "iqr" or "iqr:MULTIPLIER"
riskgame::OutlierPolicy parse_outlier_policy(const std::string& text) {
  if (text.empty() || text == "none") return riskgame::OutlierPolicy::none();
  if (text == "iqr") return riskgame::OutlierPolicy::iqr();
  if (text.rfind("iqr:", 0) == 0) {
    try {
      const double multiplier = std::stod(text.substr(4));
      if (multiplier >= 0.0) return riskgame::OutlierPolicy::iqr(multiplier);
    } catch (const std::exception&) {
    }
  }
  riskgame::fail(errc::invalid_argument,
                 "outlier policy must be none, iqr or iqr:MULTIPLIER, got '" + text + "'");
}

// ---------------------------------------------------------------- smooth ---

struct SmoothArgs {
  std::string in, out, cell, outliers, config;
  Eigen::Index support_max{0};
  double bandwidth{-1.0};  // <0: per-cell Silverman, 0: none
};

int run_smooth(const SmoothArgs& args) {
  const riskgame::io::SurveyData survey = riskgame::io::read_survey_csv(args.in, args.support_max);
  const auto missing = riskgame::io::empty_cells(survey);
  const riskgame::OutlierPolicy policy = parse_outlier_policy(args.outliers);

  auto smooth_cell = [&](const riskgame::Observations& raw) {
    const riskgame::Observations obs = riskgame::remove_outliers(raw, policy).cleaned;
    riskgame::LossDistribution d = riskgame::build_empirical(obs, args.support_max);
    double h = args.bandwidth;
    if (h < 0.0) {
      try {
        h = riskgame::silverman_bandwidth(obs);
      } catch (const error& e) {
        if (e.code() != errc::degenerate_sample) throw;
        h = 0.5;
      }
    }
    return h > 0.0 ? riskgame::smooth(d, h) : d;
  };

  json result;
  std::vector<std::pair<fs::path, riskgame::LossDistribution>> plots;
  if (!args.cell.empty()) {
    const auto coords = split_list(args.cell);
    if (coords.size() != 3) riskgame::fail(errc::invalid_argument, "--cell wants 'defense,attack,goal'");
    const riskgame::Observations* obs = nullptr;
    for (const auto& [key, value] : survey.cells)
      if (value.defense == coords[0] && value.attack == coords[1] && value.goal == coords[2])
        obs = &value;
    if (obs == nullptr)
      riskgame::fail(errc::empty_cell, "no usable answers for cell (" + coords[0] + "," +
                                           coords[1] + "," + coords[2] + ")");
    const riskgame::LossDistribution d = smooth_cell(*obs);
    result = riskgame::io::to_json(d);
    if (!args.out.empty()) plots.emplace_back(with_suffix(args.out, ".dat"), d);
  } else {
    json cells = json::array();
    for (const auto& [key, obs] : survey.cells) {
      const riskgame::LossDistribution d = smooth_cell(obs);
      cells.push_back(json{{"defense", obs.defense},
                           {"attack", obs.attack},
                           {"goal", obs.goal},
                           {"distribution", riskgame::io::to_json(d)}});
      if (!args.out.empty()) {
        const auto& [i, j, g] = key;
        plots.emplace_back(with_suffix(args.out, ".cell-" + std::to_string(i + 1) + "-" +
                                                     std::to_string(j + 1) + "-" +
                                                     std::to_string(g + 1) + ".dat"),
                           d);
      }
    }
    result = json{{"cells", cells}, {"skipped_blank", survey.skipped_blank}};
  }

  if (!args.out.empty()) {
    riskgame::io::write_json_file(args.out, result);
    for (const auto& [path, d] : plots) riskgame::io::write_plot_data(path, d);
  } else {
    std::cout << result.dump(2) << "\n";
  }
  std::cout << "cells: " << survey.cells.size() << ", blank answers skipped: "
            << survey.skipped_blank << ", empty cells: " << missing.size() << "\n";
  for (const auto& [d, a, g] : missing)
    std::cout << "  empty: (" << d << "," << a << "," << g << ")\n";
  return 0;
}

// ---------------------------------------------------------------- prefer ---

struct PreferArgs {
  std::string first, second, weights, out, config;
  double tol{riskgame::kPreferenceTolerance};
};

int run_prefer(const PreferArgs& args) {
  const auto fs_list = load_distributions(args.first);
  const auto gs_list = load_distributions(args.second);
  std::vector<double> weights;
  if (!args.weights.empty())
    weights = parse_weights(args.weights);
  else
    weights.assign(fs_list.size(), 1.0);
  const riskgame::PreferenceResult r = riskgame::prefer_multi(fs_list, gs_list, weights, args.tol);
  if (!args.out.empty()) riskgame::io::write_json_file(args.out, riskgame::io::to_json(r));
  const char* meaning = r.verdict == 0   ? "indifferent"
                        : r.verdict == 1 ? "first preferred (less severe)"
                                         : "second preferred (less severe)";
  std::cout << "verdict: " << r.verdict << " (" << meaning << ")\n";
  if (r.decided_at_category)
    std::cout << "decided at category " << *r.decided_at_category << "\n";
  return 0;
}

// ----------------------------------------------------------------- solve ---

struct SolveArgs {
  std::string in, game, out, weights, controls, emit_game, outliers, config;
  Eigen::Index support_max{0};
  Eigen::Index iterations{1000};
  Eigen::Index cutoff{-1};
  double bandwidth{-1.0};
  Eigen::Index tail_category{-1};
};

int run_solve(const SolveArgs& args, const ConfigOverlay& config) {
  riskgame::Game game = [&] {
    if (!args.game.empty())
      return riskgame::io::game_from_json(riskgame::io::load_json_file(args.game));
    require_value(args.in, "--in (or --game)");
    if (args.support_max < 1) {
      std::cerr << "error: --support-max is required with --in\n";
      std::exit(kExitUsage);
    }
    const riskgame::io::SurveyData survey = riskgame::io::read_survey_csv(args.in, args.support_max);
    std::optional<double> bandwidth;
    if (args.bandwidth >= 0.0) bandwidth = args.bandwidth;
    std::vector<double> goal_weights;
    if (!args.weights.empty()) goal_weights = parse_weights(args.weights);
    return riskgame::io::build_game_from_survey(survey, args.support_max, bandwidth,
                                                goal_weights,
                                                parse_outlier_policy(args.outliers));
  }();

  std::map<std::string, riskgame::ControlKind> kinds;
  if (!args.controls.empty()) {
    const json kinds_doc = riskgame::io::load_json_file(args.controls);
    for (const auto& [defense, kind] : kinds_doc.items()) {
      const std::string name = kind.get<std::string>();
      if (name != "static" && name != "dynamic")
        riskgame::fail(errc::invalid_argument, "control kind must be static or dynamic");
      kinds[defense] = name == "static" ? riskgame::ControlKind::static_control
                                        : riskgame::ControlKind::dynamic_control;
    }
  }
  for (const auto& label : game.defense_labels)
    if (kinds.find(label) == kinds.end()) kinds[label] = riskgame::ControlKind::static_control;

  const riskgame::Equilibrium eq =
      riskgame::fictitious_play(game, args.iterations, args.cutoff);
  const riskgame::EquilibriumReport report = riskgame::interpret_equilibrium(
      eq, game.defense_labels, game.attack_labels, game.goal_labels, kinds, 1e-6,
      args.tail_category);
  const std::string text =
      riskgame::io::render_report(report, eq, game.defense_labels, config.category_labels());

  if (!args.emit_game.empty())
    riskgame::io::write_json_file(args.emit_game, riskgame::io::to_json(game));
  if (!args.out.empty()) {
    riskgame::io::write_json_file(args.out, riskgame::io::to_json(eq));
    riskgame::io::write_json_file(with_suffix(args.out, ".report.json"),
                                  riskgame::io::to_json(report));
    riskgame::io::write_file_atomic(with_suffix(args.out, ".report.txt"), text);
    for (std::size_t g = 0; g < eq.assurances.size(); ++g)
      riskgame::io::write_plot_data(
          with_suffix(args.out, ".assurance-" + std::to_string(g + 1) + ".dat"),
          eq.assurances[g]);
  }
  std::cout << text;
  return 0;
}

// ------------------------------------------------------------------ rank ---

struct RankArgs {
  std::string in, out, config;
};

int run_rank(const RankArgs& args) {
  const json doc = riskgame::io::load_json_file(args.in);
  std::vector<riskgame::LossDistribution> impacts, likelihoods;
  std::vector<std::string> ids;
  if (!doc.contains("threats") || !doc.at("threats").is_array() || doc.at("threats").empty())
    riskgame::fail(errc::invalid_argument, "rank input wants a nonempty 'threats' array");
  for (const auto& threat : doc.at("threats")) {
    ids.push_back(threat.value("id", "T" + std::to_string(ids.size() + 1)));
    impacts.push_back(riskgame::io::loss_distribution_from_json(threat.at("impact")));
    likelihoods.push_back(riskgame::io::loss_distribution_from_json(threat.at("likelihood")));
  }
  const riskgame::ThreatRanking ranking =
      riskgame::rank_threats<double>(impacts, likelihoods, ids);
  if (!args.out.empty())
    riskgame::io::write_json_file(args.out, riskgame::io::to_json(ranking));
  std::cout << "threat  impact-rank  likelihood-rank  zone\n";
  for (const auto& e : ranking.entries)
    std::printf("%-7s %11d  %15d  %s\n", e.id.c_str(), e.impact_rank, e.likelihood_rank,
                e.critical ? "critical" : "acceptable");
  return 0;
}

// ------------------------------------------------------------------- apt ---

struct AptArgs {
  std::string graph, scenario, target, out, config;
  Eigen::Index iterations{0};  // 0: take the scenario's value
};

int run_apt_paths(const AptArgs& args) {
  const riskgame::AttackGraph graph =
      riskgame::io::attack_graph_from_json(riskgame::io::load_json_file(args.graph));
  const auto paths = riskgame::enumerate_attack_paths(graph);
  json out = json::array();
  for (const auto& p : paths) out.push_back(json{{"nodes", p.nodes}, {"exploits", p.exploits}});
  if (!args.out.empty()) riskgame::io::write_json_file(args.out, json{{"paths", out}});
  std::cout << paths.size() << " attack paths\n";
  for (std::size_t k = 0; k < paths.size(); ++k) {
    std::cout << k + 1 << ": ";
    for (std::size_t s = 0; s < paths[k].exploits.size(); ++s)
      std::cout << (s > 0 ? " -> " : "") << paths[k].exploits[s];
    std::cout << "\n";
  }
  return 0;
}

int run_apt_stages(const AptArgs& args) {
  const riskgame::AttackGraph graph =
      riskgame::io::attack_graph_from_json(riskgame::io::load_json_file(args.graph));
  const std::string target = args.target.empty() ? graph.target : args.target;
  const riskgame::StagePartition stages = riskgame::build_stages(graph, target);
  json out;
  out["target"] = target;
  out["stages"] = stages.stages;
  out["unreachable"] = stages.unreachable;
  if (!args.out.empty()) riskgame::io::write_json_file(args.out, out);
  for (std::size_t s = 0; s < stages.stages.size(); ++s) {
    std::cout << "stage " << s + 1 << " (distance " << s + 1 << "):";
    for (const auto& node : stages.stages[s]) std::cout << " {" << node << "}";
    std::cout << "\n";
  }
  if (!stages.unreachable.empty()) {
    std::cout << "unreachable:";
    for (const auto& node : stages.unreachable) std::cout << " " << node;
    std::cout << "\n";
  }
  return 0;
}

int run_apt_solve(const AptArgs& args) {
  riskgame::io::AptScenario scenario =
      riskgame::io::apt_scenario_from_json(riskgame::io::load_json_file(args.scenario));
  if (args.iterations > 0) scenario.fp_iterations = args.iterations;
  std::vector<riskgame::StageDynamics<double>> dynamics;
  for (const auto& s : scenario.stages) dynamics.push_back(s);
  const auto solutions = riskgame::solve_sequential_apt(
      dynamics, scenario.initial, scenario.fp_iterations, scenario.fixpoint_tol,
      scenario.max_fixpoint_rounds);
  json stages = json::array();
  for (const auto& sol : solutions)
    stages.push_back(json{{"payoff", riskgame::io::to_json(sol.payoff)},
                          {"equilibrium", riskgame::io::to_json(sol.equilibrium)},
                          {"fixpoint_rounds", sol.fixpoint_rounds},
                          {"residual", sol.residual}});
  if (!args.out.empty()) {
    riskgame::io::write_json_file(args.out, json{{"stages", stages}});
    for (std::size_t n = 0; n < solutions.size(); ++n)
      riskgame::io::write_plot_data(
          with_suffix(args.out, ".stage-" + std::to_string(n + 1) + ".dat"),
          solutions[n].payoff);
  }
  for (std::size_t n = 0; n < solutions.size(); ++n)
    std::printf("stage %zu: mean loss %.4f, defend frequency %.3f, residual %.2e (%d rounds)\n",
                n + 1, riskgame::mean(solutions[n].payoff),
                solutions[n].equilibrium.optimal_defense[0], solutions[n].residual,
                solutions[n].fixpoint_rounds);
  return 0;
}

// ---------------------------------------------------------------- hitset ---

struct HitsetArgs {
  std::string in, mode{"cardinality"}, out, config;
};

int run_hitset(const HitsetArgs& args) {
  const riskgame::ControlRelation rel = riskgame::io::read_control_csv(args.in);
  riskgame::HittingSetMode mode;
  if (args.mode == "cardinality")
    mode = riskgame::HittingSetMode::cardinality;
  else if (args.mode == "subset-minimal")
    mode = riskgame::HittingSetMode::subset_minimal;
  else {
    std::cerr << "error: --mode must be cardinality or subset-minimal\n";
    return kExitUsage;
  }
  const auto defenses = riskgame::minimal_hitting_set(rel, mode);
  if (!args.out.empty())
    riskgame::io::write_json_file(args.out, json{{"defenses", defenses}, {"mode", args.mode}});
  std::cout << "selected " << defenses.size() << " of " << rel.defenses.size() << " defenses:";
  for (const auto& d : defenses) std::cout << " " << d;
  std::cout << "\n";
  return 0;
}

// -------------------------------------------------------------- schedule ---

struct ScheduleArgs {
  std::string action{"action"}, time_unit{"day"}, out, config;
  double p{-1.0};
  double horizon{0.0};
  std::uint64_t seed{0};
};

int run_schedule(const ScheduleArgs& args) {
  const riskgame::Schedule schedule =
      riskgame::schedule_actions(args.p, args.horizon, args.seed, args.action, args.time_unit);
  if (!args.out.empty())
    riskgame::io::write_json_file(args.out, riskgame::io::to_json(schedule));
  std::cout << schedule.event_times.size() << " events over " << args.horizon << " "
            << args.time_unit << "s (rate " << args.p << " per " << args.time_unit << ")\n";
  return 0;
}

// --------------------------------------------------------------- ratetest ---

struct RatetestArgs {
  std::string out, config;
  std::int64_t past_count{-1}, new_count{-1};
  double past_period{0.0}, new_period{0.0}, alpha{0.05};
};

int run_ratetest(const RatetestArgs& args) {
  const riskgame::RateTestResult r = riskgame::rate_ratio_test(
      args.past_count, args.new_count, args.past_period, args.new_period, args.alpha);
  if (!args.out.empty()) riskgame::io::write_json_file(args.out, riskgame::io::to_json(r));
  std::printf("one-sided rate-ratio test: p = %.6g (alpha %.4g)\n", r.p_value, r.alpha);
  std::cout << (r.rejected
                    ? "rejected: the past incident rate exceeds the new one\n"
                    : "not rejected: no evidence the new regime lowers the incident rate\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"game-theoretic risk management with distribution-valued payoffs"};
  app.require_subcommand(1);

  ConfigOverlay config;

  SmoothArgs smooth_args;
  auto* smooth_cmd = app.add_subcommand(
      "smooth", "build smoothed loss distributions from a survey CSV");
  smooth_cmd->add_option("--config", smooth_args.config, "flat JSON config; flags win");
  config.wire(smooth_cmd->add_option("--in", smooth_args.in, "survey CSV"), smooth_args.in, "in");
  config.wire(smooth_cmd->add_option("--support-max", smooth_args.support_max,
                                     "number of loss categories"),
              smooth_args.support_max, "support-max");
  config.wire(smooth_cmd->add_option("--bandwidth", smooth_args.bandwidth,
                                     "kernel bandwidth (0 = none; default Silverman)"),
              smooth_args.bandwidth, "bandwidth");
  config.wire(smooth_cmd->add_option("--cell", smooth_args.cell, "single cell 'defense,attack,goal'"),
              smooth_args.cell, "cell");
  config.wire(smooth_cmd->add_option("--outliers", smooth_args.outliers,
                                     "rating filter: none, iqr or iqr:MULT"),
              smooth_args.outliers, "outliers");
  config.wire(smooth_cmd->add_option("--out", smooth_args.out, "output JSON path"),
              smooth_args.out, "out");

  PreferArgs prefer_args;
  auto* prefer_cmd =
      app.add_subcommand("prefer", "decide which of two loss profiles is less severe");
  prefer_cmd->add_option("--config", prefer_args.config, "flat JSON config; flags win");
  config.wire(prefer_cmd->add_option("--first", prefer_args.first,
                                     "distribution JSON path(s), one per goal"),
              prefer_args.first, "first");
  config.wire(prefer_cmd->add_option("--second", prefer_args.second,
                                     "distribution JSON path(s), one per goal"),
              prefer_args.second, "second");
  config.wire(prefer_cmd->add_option("--weights", prefer_args.weights, "goal weights w1,w2,..."),
              prefer_args.weights, "weights");
  config.wire(prefer_cmd->add_option("--tol", prefer_args.tol, "comparison tolerance"),
              prefer_args.tol, "tol");
  config.wire(prefer_cmd->add_option("--out", prefer_args.out, "verdict JSON path"),
              prefer_args.out, "out");

  SolveArgs solve_args;
  auto* solve_cmd =
      app.add_subcommand("solve", "compute the security-strategy equilibrium of a game");
  solve_cmd->add_option("--config", solve_args.config, "flat JSON config; flags win");
  config.wire(solve_cmd->add_option("--in", solve_args.in, "survey CSV"), solve_args.in, "in");
  config.wire(solve_cmd->add_option("--game", solve_args.game, "game JSON (alternative input)"),
              solve_args.game, "game");
  config.wire(solve_cmd->add_option("--support-max", solve_args.support_max,
                                    "number of loss categories (with --in)"),
              solve_args.support_max, "support-max");
  config.wire(solve_cmd->add_option("--bandwidth", solve_args.bandwidth,
                                    "kernel bandwidth (0 = none; default Silverman)"),
              solve_args.bandwidth, "bandwidth");
  config.wire(solve_cmd->add_option("--iterations", solve_args.iterations,
                                    "fictitious play iterations"),
              solve_args.iterations, "iterations");
  config.wire(solve_cmd->add_option("--cutoff", solve_args.cutoff,
                                    "truncation category (default: full support)"),
              solve_args.cutoff, "cutoff");
  config.wire(solve_cmd->add_option("--weights", solve_args.weights, "goal weights w1,w2,..."),
              solve_args.weights, "weights");
  config.wire(solve_cmd->add_option("--controls", solve_args.controls,
                                    "JSON map defense -> static|dynamic"),
              solve_args.controls, "controls");
  config.wire(solve_cmd->add_option("--outliers", solve_args.outliers,
                                    "rating filter: none, iqr or iqr:MULT"),
              solve_args.outliers, "outliers");
  config.wire(solve_cmd->add_option("--tail-category", solve_args.tail_category,
                                    "category for the reported tail probability"),
              solve_args.tail_category, "tail-category");
  config.wire(solve_cmd->add_option("--emit-game", solve_args.emit_game,
                                    "write the assembled game JSON here"),
              solve_args.emit_game, "emit-game");
  config.wire(solve_cmd->add_option("--out", solve_args.out,
                                    "equilibrium JSON path (report files share the stem)"),
              solve_args.out, "out");

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "rank threats into the rank-scaled risk matrix");
  rank_cmd->add_option("--config", rank_args.config, "flat JSON config; flags win");
  config.wire(rank_cmd->add_option("--in", rank_args.in, "threats JSON"), rank_args.in, "in");
  config.wire(rank_cmd->add_option("--out", rank_args.out, "ranking JSON path"), rank_args.out,
              "out");

  AptArgs apt_args;
  auto* apt_cmd = app.add_subcommand("apt", "attack-graph and stage-game analysis");
  apt_cmd->require_subcommand(1);
  auto* apt_paths_cmd = apt_cmd->add_subcommand("paths", "enumerate attack paths");
  auto* apt_stages_cmd = apt_cmd->add_subcommand("stages", "partition nodes by distance");
  auto* apt_solve_cmd = apt_cmd->add_subcommand("solve", "solve the sequential stage games");
  for (auto* sub : {apt_paths_cmd, apt_stages_cmd}) {
    sub->add_option("--config", apt_args.config, "flat JSON config; flags win");
    config.wire(sub->add_option("--graph", apt_args.graph, "attack graph JSON"), apt_args.graph,
                "graph");
    config.wire(sub->add_option("--out", apt_args.out, "output JSON path"), apt_args.out, "out");
  }
  config.wire(apt_stages_cmd->add_option("--target", apt_args.target, "override target node"),
              apt_args.target, "target");
  apt_solve_cmd->add_option("--config", apt_args.config, "flat JSON config; flags win");
  config.wire(apt_solve_cmd->add_option("--scenario", apt_args.scenario, "APT scenario JSON"),
              apt_args.scenario, "scenario");
  config.wire(apt_solve_cmd->add_option("--iterations", apt_args.iterations,
                                        "override fictitious play iterations"),
              apt_args.iterations, "iterations");
  config.wire(apt_solve_cmd->add_option("--out", apt_args.out, "output JSON path"), apt_args.out,
              "out");

  HitsetArgs hitset_args;
  auto* hitset_cmd =
      app.add_subcommand("hitset", "minimal hitting set of defenses covering all threats");
  hitset_cmd->add_option("--config", hitset_args.config, "flat JSON config; flags win");
  config.wire(hitset_cmd->add_option("--in", hitset_args.in, "control relation CSV"),
              hitset_args.in, "in");
  config.wire(hitset_cmd->add_option("--mode", hitset_args.mode,
                                     "cardinality or subset-minimal"),
              hitset_args.mode, "mode");
  config.wire(hitset_cmd->add_option("--out", hitset_args.out, "output JSON path"),
              hitset_args.out, "out");

  ScheduleArgs schedule_args;
  auto* schedule_cmd =
      app.add_subcommand("schedule", "sample a Poisson action plan from a frequency");
  schedule_cmd->add_option("--config", schedule_args.config, "flat JSON config; flags win");
  config.wire(schedule_cmd->add_option("--p", schedule_args.p, "actions per time unit in [0,1]"),
              schedule_args.p, "p");
  config.wire(schedule_cmd->add_option("--horizon", schedule_args.horizon, "planning horizon"),
              schedule_args.horizon, "horizon");
  config.wire(schedule_cmd->add_option("--seed", schedule_args.seed, "random seed"),
              schedule_args.seed, "seed");
  config.wire(schedule_cmd->add_option("--action", schedule_args.action, "action label"),
              schedule_args.action, "action");
  config.wire(schedule_cmd->add_option("--time-unit", schedule_args.time_unit, "time unit name"),
              schedule_args.time_unit, "time-unit");
  config.wire(schedule_cmd->add_option("--out", schedule_args.out, "schedule JSON path"),
              schedule_args.out, "out");

  RatetestArgs ratetest_args;
  auto* ratetest_cmd =
      app.add_subcommand("ratetest", "exact one-sided Poisson rate-ratio test");
  ratetest_cmd->add_option("--config", ratetest_args.config, "flat JSON config; flags win");
  config.wire(ratetest_cmd->add_option("--past-count", ratetest_args.past_count,
                                       "severe incidents before the change"),
              ratetest_args.past_count, "past-count");
  config.wire(ratetest_cmd->add_option("--new-count", ratetest_args.new_count,
                                       "severe incidents after the change"),
              ratetest_args.new_count, "new-count");
  config.wire(ratetest_cmd->add_option("--past-period", ratetest_args.past_period,
                                       "observation period before"),
              ratetest_args.past_period, "past-period");
  config.wire(ratetest_cmd->add_option("--new-period", ratetest_args.new_period,
                                       "observation period after"),
              ratetest_args.new_period, "new-period");
  config.wire(ratetest_cmd->add_option("--alpha", ratetest_args.alpha, "significance level"),
              ratetest_args.alpha, "alpha");
  config.wire(ratetest_cmd->add_option("--out", ratetest_args.out, "result JSON path"),
              ratetest_args.out, "out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    // the config path is per-subcommand; whichever ran owns it
    for (const std::string* path :
         {&smooth_args.config, &prefer_args.config, &solve_args.config, &rank_args.config,
          &apt_args.config, &hitset_args.config, &schedule_args.config, &ratetest_args.config})
      if (!path->empty()) config.load(*path);
    config.apply();

    if (smooth_cmd->parsed()) {
      require_value(smooth_args.in, "--in");
      if (smooth_args.support_max < 1) {
        std::cerr << "error: --support-max is required\n";
        return kExitUsage;
      }
      return run_smooth(smooth_args);
    }
    if (prefer_cmd->parsed()) {
      require_value(prefer_args.first, "--first");
      require_value(prefer_args.second, "--second");
      return run_prefer(prefer_args);
    }
    if (solve_cmd->parsed()) return run_solve(solve_args, config);
    if (rank_cmd->parsed()) {
      require_value(rank_args.in, "--in");
      return run_rank(rank_args);
    }
    if (apt_cmd->parsed()) {
      if (apt_paths_cmd->parsed()) {
        require_value(apt_args.graph, "--graph");
        return run_apt_paths(apt_args);
      }
      if (apt_stages_cmd->parsed()) {
        require_value(apt_args.graph, "--graph");
        return run_apt_stages(apt_args);
      }
      require_value(apt_args.scenario, "--scenario");
      return run_apt_solve(apt_args);
    }
    if (hitset_cmd->parsed()) {
      require_value(hitset_args.in, "--in");
      return run_hitset(hitset_args);
    }
    if (schedule_cmd->parsed()) {
      if (schedule_args.p < 0.0 || schedule_args.horizon <= 0.0) {
        std::cerr << "error: --p and --horizon are required\n";
        return kExitUsage;
      }
      return run_schedule(schedule_args);
    }
    if (ratetest_cmd->parsed()) {
      if (ratetest_args.past_count < 0 || ratetest_args.new_count < 0 ||
          ratetest_args.past_period <= 0.0 || ratetest_args.new_period <= 0.0) {
        std::cerr << "error: --past-count, --new-count, --past-period and --new-period "
                     "are required\n";
        return kExitUsage;
      }
      return run_ratetest(ratetest_args);
    }
    std::cerr << "error: unknown command\n";
    return kExitUsage;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == errc::no_convergence ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
