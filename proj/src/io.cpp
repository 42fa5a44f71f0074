#include "riskgame/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace riskgame::io {

namespace {

const json& require(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end())
    fail(errc::invalid_argument, std::string(what) + " is missing field '" + key + "'");
  return *it;
}

DistributionKind kind_from_string(const std::string& s) {
  if (s == "discrete-categorical") return DistributionKind::categorical;
  if (s == "discretized-continuous") return DistributionKind::discretized_continuous;
  fail(errc::invalid_argument, "unknown distribution kind '" + s + "'");
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) fail(errc::invalid_argument, std::string(what) + " must be an array");
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

}  // namespace

json to_json(const LossDistribution& d) {
  return json{{"support_max", d.support_max()},
              {"masses", vector_to_json(d.masses)},
              {"bandwidth", d.bandwidth},
              {"kind", kind_name(d.kind)},
              {"observation_count", d.observation_count}};
}

LossDistribution loss_distribution_from_json(const json& j) {
  if (!j.is_object()) fail(errc::invalid_argument, "loss distribution must be a JSON object");
  LossDistribution d;
  d.masses = vector_from_json(require(j, "masses", "loss distribution"), "masses");
  d.bandwidth = require(j, "bandwidth", "loss distribution").get<double>();
  d.kind = kind_from_string(require(j, "kind", "loss distribution").get<std::string>());
  d.observation_count = j.value("observation_count", 0);
  const auto support = require(j, "support_max", "loss distribution").get<Eigen::Index>();
  if (support != d.support_max())
    fail(errc::invalid_argument, "support_max does not match the mass array length");
  validate(d);
  return d;
}

json to_json(const Game& g) {
  json payoffs = json::array();
  for (Eigen::Index i = 0; i < g.defenses; ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < g.attacks; ++j) {
      json cell = json::array();
      for (Eigen::Index goal = 0; goal < g.goals; ++goal)
        cell.push_back(to_json(g.payoff(i, j, goal)));
      row.push_back(std::move(cell));
    }
    payoffs.push_back(std::move(row));
  }
  return json{{"n", g.defenses},
              {"m", g.attacks},
              {"d", g.goals},
              {"defense_labels", g.defense_labels},
              {"attack_labels", g.attack_labels},
              {"goal_labels", g.goal_labels},
              {"goal_weights", vector_to_json(g.goal_weights)},
              {"payoffs", payoffs}};
}

Game game_from_json(const json& j) {
  if (!j.is_object()) fail(errc::invalid_argument, "game must be a JSON object");
  const auto n = require(j, "n", "game").get<Eigen::Index>();
  const auto m = require(j, "m", "game").get<Eigen::Index>();
  const auto d = require(j, "d", "game").get<Eigen::Index>();
  const json& payoffs = require(j, "payoffs", "game");
  if (!payoffs.is_array() || static_cast<Eigen::Index>(payoffs.size()) != n)
    fail(errc::incomplete_grid, "payoff grid does not have n rows");
  std::vector<LossDistribution> grid;
  grid.reserve(n * m * d);
  for (const auto& row : payoffs) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m)
      fail(errc::incomplete_grid, "payoff row does not have m cells");
    for (const auto& cell : row) {
      if (!cell.is_array() || static_cast<Eigen::Index>(cell.size()) != d)
        fail(errc::incomplete_grid, "payoff cell does not have d goals");
      for (const auto& dist : cell) grid.push_back(loss_distribution_from_json(dist));
    }
  }
  std::vector<double> weights;
  if (j.contains("goal_weights"))
    weights = j.at("goal_weights").get<std::vector<double>>();
  return assemble_game<double>(n, m, d, std::move(grid),
                               j.value("defense_labels", std::vector<std::string>{}),
                               j.value("attack_labels", std::vector<std::string>{}),
                               j.value("goal_labels", std::vector<std::string>{}),
                               std::span<const double>(weights));
}

json to_json(const Equilibrium& eq) {
  json assurances = json::array();
  for (const auto& a : eq.assurances) assurances.push_back(to_json(a));
  return json{{"optimal_defense", vector_to_json(eq.optimal_defense)},
              {"optimal_attack", vector_to_json(eq.optimal_attack)},
              {"assurances", assurances},
              {"iterations", eq.iterations},
              {"cutoff", eq.cutoff}};
}

Equilibrium equilibrium_from_json(const json& j) {
  Equilibrium eq;
  eq.optimal_defense = vector_from_json(require(j, "optimal_defense", "equilibrium"), "mix");
  eq.optimal_attack = vector_from_json(require(j, "optimal_attack", "equilibrium"), "mix");
  for (const auto& a : require(j, "assurances", "equilibrium"))
    eq.assurances.push_back(loss_distribution_from_json(a));
  eq.iterations = j.value("iterations", 0);
  eq.cutoff = j.value("cutoff", 0);
  return eq;
}

json to_json(const AttackGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back(json{{"from", e.from}, {"to", e.to}, {"label", e.label}});
  return json{
      {"nodes", g.nodes}, {"edges", edges}, {"source", g.source}, {"target", g.target}};
}

AttackGraph attack_graph_from_json(const json& j) {
  AttackGraph g;
  g.nodes = require(j, "nodes", "attack graph").get<std::vector<std::string>>();
  for (const auto& e : require(j, "edges", "attack graph")) {
    g.edges.push_back({require(e, "from", "edge").get<std::string>(),
                       require(e, "to", "edge").get<std::string>(),
                       e.value("label", std::string{})});
  }
  g.source = j.value("source", std::string{});
  g.target = require(j, "target", "attack graph").get<std::string>();
  return g;
}

json to_json(const PreferenceResult& r) {
  json j{{"verdict", r.verdict}};
  if (r.decided_at_category)
    j["decided_at_category"] = *r.decided_at_category;
  else
    j["decided_at_category"] = nullptr;
  return j;
}

json to_json(const Schedule& s) {
  return json{{"action", s.action},   {"p", s.frequency},
              {"time_unit", s.time_unit}, {"horizon", s.horizon},
              {"seed", s.seed},       {"event_times", s.event_times}};
}

Schedule schedule_from_json(const json& j) {
  Schedule s;
  s.action = j.value("action", "action");
  s.frequency = require(j, "p", "schedule").get<double>();
  s.time_unit = j.value("time_unit", "day");
  s.horizon = require(j, "horizon", "schedule").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  s.event_times = j.value("event_times", std::vector<double>{});
  return s;
}

json to_json(const RateTestResult& r) {
  return json{{"past_count", r.past_count}, {"new_count", r.new_count},
              {"past_period", r.past_period}, {"new_period", r.new_period},
              {"alpha", r.alpha},          {"p_value", r.p_value},
              {"rejected", r.rejected}};
}

json to_json(const ThreatRanking& r) {
  json threats = json::array();
  for (const auto& e : r.entries)
    threats.push_back(json{{"id", e.id},
                           {"impact_rank", e.impact_rank},
                           {"likelihood_rank", e.likelihood_rank},
                           {"zone", e.critical ? "critical" : "acceptable"}});
  return json{{"threats", threats}};
}

json to_json(const EquilibriumReport& r) {
  json controls = json::array();
  for (const auto& c : r.controls)
    controls.push_back(json{{"defense", c.defense},
                            {"kind", control_kind_name(c.kind)},
                            {"frequency", c.frequency},
                            {"action", c.kind == ControlKind::static_control
                                           ? "implement"
                                           : "schedule"}});
  json attacks = json::array();
  for (const auto& [label, frequency] : r.worst_case_attacks)
    attacks.push_back(json{{"attack", label}, {"frequency", frequency}});
  json goals = json::array();
  for (const auto& g : r.goals)
    goals.push_back(json{{"goal", g.goal},
                         {"mean", g.mean},
                         {"variance", g.variance},
                         {"quantile_95", g.quantile_95},
                         {"tail_category", g.tail_category},
                         {"tail_probability", g.tail_probability}});
  return json{{"controls", controls},
              {"worst_case_attacks", attacks},
              {"goals", goals},
              {"frequency_threshold", r.frequency_threshold}};
}

json to_json(const AptScenario& s) {
  json stages = json::array();
  for (const auto& st : s.stages)
    stages.push_back(json{{"p", st.penetrate_success}, {"q", st.stay_success}});
  return json{{"stages", stages},
              {"I0", to_json(s.initial)},
              {"fp_iters", s.fp_iterations},
              {"fixpoint_tol", s.fixpoint_tol},
              {"max_fixpoint_rounds", s.max_fixpoint_rounds}};
}

AptScenario apt_scenario_from_json(const json& j) {
  AptScenario s;
  for (const auto& st : require(j, "stages", "apt scenario"))
    s.stages.push_back({require(st, "p", "stage").get<double>(),
                        require(st, "q", "stage").get<double>()});
  s.initial = loss_distribution_from_json(require(j, "I0", "apt scenario"));
  s.fp_iterations = j.value("fp_iters", 1000);
  s.fixpoint_tol = j.value("fixpoint_tol", 1e-6);
  s.max_fixpoint_rounds = j.value("max_fixpoint_rounds", 100);
  return s;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_argument, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(errc::invalid_argument, "malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::invalid_argument, "cannot write " + tmp.string());
    out << content;
    if (!out) fail(errc::invalid_argument, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(errc::invalid_argument, "cannot move output into place at " + path.string());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

std::string plot_data(const LossDistribution& d) {
  std::string out;
  char line[64];
  for (Eigen::Index k = 1; k <= d.support_max(); ++k) {
    std::snprintf(line, sizeof line, "%" PRIdPTR " %.17g\n", static_cast<intptr_t>(k),
                  d.mass(k));
    out += line;
  }
  return out;
}

void write_plot_data(const std::filesystem::path& path, const LossDistribution& d) {
  write_file_atomic(path, plot_data(d));
}

}  // namespace riskgame::io
