#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "riskgame/errors.hpp"
#include "riskgame/game.hpp"
#include "riskgame/loss_distribution.hpp"

namespace riskgame {

/// Directed attack graph. Nodes are attacker states, edges carry the exploit
/// that moves the attacker from one state to the next.
struct AttackGraph {
  struct Edge {
    std::string from;
    std::string to;
    std::string label;
  };

  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::string source;
  std::string target;
};

struct AttackPath {
  std::vector<std::string> nodes;     // visited states, source..target
  std::vector<std::string> exploits;  // edge labels along the path
};

/// Node sets at increasing graph distance from the target asset; stage i
/// (1-based) holds the nodes at distance i. The target itself is excluded.
struct StagePartition {
  std::vector<std::vector<std::string>> stages;
  std::vector<std::string> unreachable;
};

namespace detail {

inline void check_graph(const AttackGraph& g) {
  std::set<std::string> known(g.nodes.begin(), g.nodes.end());
  if (known.count(g.source) == 0) fail(errc::invalid_argument, "source node not declared");
  if (known.count(g.target) == 0) fail(errc::invalid_argument, "target node not declared");
  for (const auto& e : g.edges)
    if (known.count(e.from) == 0 || known.count(e.to) == 0)
      fail(errc::invalid_argument, "edge references undeclared node " +
                                       (known.count(e.from) == 0 ? e.from : e.to));
}

}  // namespace detail

/// Enumerates every simple source-to-target path as its exploit sequence,
/// ordered lexicographically by the visited node sequence.
inline std::vector<AttackPath> enumerate_attack_paths(const AttackGraph& g) {
  detail::check_graph(g);
  // adjacency sorted by successor id gives the lexicographic emission order
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> adjacency;
  for (const auto& e : g.edges) adjacency[e.from].emplace_back(e.to, e.label);
  for (auto& [_, next] : adjacency) std::sort(next.begin(), next.end());

  std::vector<AttackPath> paths;
  std::set<std::string> visited;
  AttackPath current;
  current.nodes.push_back(g.source);
  visited.insert(g.source);

  auto walk = [&](auto&& self, const std::string& node) -> void {
    if (node == g.target) {
      paths.push_back(current);
      return;
    }
    auto it = adjacency.find(node);
    if (it == adjacency.end()) return;
    for (const auto& [next, label] : it->second) {
      if (visited.count(next) != 0) continue;
      visited.insert(next);
      current.nodes.push_back(next);
      current.exploits.push_back(label);
      self(self, next);
      current.exploits.pop_back();
      current.nodes.pop_back();
      visited.erase(next);
    }
  };
  walk(walk, g.source);
  if (paths.empty()) fail(errc::no_path, "target " + g.target + " is unreachable from " + g.source);
  return paths;
}

/// Breadth-first distance partition around the target, treating edges as
/// undirected infrastructure links. Unreachable nodes are reported, not fatal.
inline StagePartition build_stages(const AttackGraph& g, const std::string& target) {
  std::set<std::string> known(g.nodes.begin(), g.nodes.end());
  if (known.count(target) == 0) fail(errc::invalid_argument, "target node not declared");
  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto& e : g.edges) {
    if (known.count(e.from) == 0 || known.count(e.to) == 0)
      fail(errc::invalid_argument, "edge references undeclared node");
    adjacency[e.from].push_back(e.to);
    adjacency[e.to].push_back(e.from);
  }
  std::map<std::string, int> distance;
  distance[target] = 0;
  std::deque<std::string> queue{target};
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    for (const auto& next : adjacency[node])
      if (distance.count(next) == 0) {
        distance[next] = distance[node] + 1;
        queue.push_back(next);
      }
  }
  StagePartition partition;
  // keep the declaration order of nodes within each stage
  for (const auto& node : g.nodes) {
    if (node == target) continue;
    auto it = distance.find(node);
    if (it == distance.end()) {
      partition.unreachable.push_back(node);
      continue;
    }
    if (static_cast<int>(partition.stages.size()) < it->second)
      partition.stages.resize(it->second);
    partition.stages[it->second - 1].push_back(node);
  }
  return partition;
}

/// Success probabilities and payoff distributions for one APT stage. I_prev
/// is the adversary payoff one stage closer to the asset, I_cur the current
/// iterate for this stage's own payoff.
template <typename Scalar = double>
struct AptStageSpecT {
  int stage_index{1};
  Scalar penetrate_success{0};  // p(n)
  Scalar stay_success{0};       // q(n)
  LossDistributionT<Scalar> payoff_prev;  // I(n-1)
  LossDistributionT<Scalar> payoff_cur;   // current guess for I(n)
};

using AptStageSpec = AptStageSpecT<double>;

/// Category reflection k -> a+1-k, the stand-in for "the attacker loses its
/// investment" on a support that only admits categories >= 1.
template <typename Scalar>
LossDistributionT<Scalar> reflect(const LossDistributionT<Scalar>& d) {
  LossDistributionT<Scalar> out = d;
  out.masses = d.masses.reverse();
  return out;
}

/// The 2x2 stage game: defend/do-not-defend against penetrate/stay.
///   (defend, penetrate)     = p * I(n-1) + (1-p) * I(n)
///   (defend, stay)          = q * I(n)   + (1-q) * reflect(I(n))
///   (not defend, penetrate) = I(n-1)
///   (not defend, stay)      = I(n)
template <typename Scalar>
GameT<Scalar> stage_game_matrix(const AptStageSpecT<Scalar>& spec) {
  if (!(spec.penetrate_success >= Scalar(0)) || spec.penetrate_success > Scalar(1) ||
      !(spec.stay_success >= Scalar(0)) || spec.stay_success > Scalar(1))
    fail(errc::invalid_argument, "stage success probabilities must lie in [0,1]");
  if (spec.payoff_prev.support_max() != spec.payoff_cur.support_max() ||
      spec.payoff_prev.kind != spec.payoff_cur.kind)
    fail(errc::support_mismatch, "stage payoff distributions on different supports");
  const auto& prev = spec.payoff_prev;
  const auto& cur = spec.payoff_cur;
  const Scalar p = spec.penetrate_success;
  const Scalar q = spec.stay_success;

  auto mix = [](const LossDistributionT<Scalar>& f, const LossDistributionT<Scalar>& g,
                Scalar w) {
    std::vector<LossDistributionT<Scalar>> parts{f, g};
    std::vector<Scalar> weights{w, Scalar(1) - w};
    return weighted_mixture(std::span<const LossDistributionT<Scalar>>(parts),
                            std::span<const Scalar>(weights));
  };

  std::vector<LossDistributionT<Scalar>> payoffs{
      mix(prev, cur, p),           // defend vs penetrate
      mix(cur, reflect(cur), q),   // defend vs stay
      prev,                        // do not defend vs penetrate
      cur,                         // do not defend vs stay
  };
  return assemble_game<Scalar>(2, 2, 1, std::move(payoffs), {"defend", "do not defend"},
                               {"penetrate", "stay"}, {"stage loss"});
}

template <typename Scalar = double>
struct StageDynamics {
  Scalar penetrate_success{0};
  Scalar stay_success{0};
};

/// Derives a stage success probability as the value of a classical 0/1
/// matrix game (entry 1 = the attacker's action succeeds): the matrix is
/// embedded as two-category point masses, solved by fictitious play, and the
/// equilibrium mean maps back to [0,1].
template <typename Scalar = double>
Scalar success_probability_from_binary_game(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& success,
    Eigen::Index iterations = 5000) {
  if (success.rows() < 1 || success.cols() < 1)
    fail(errc::invalid_argument, "success matrix must be nonempty");
  std::vector<LossDistributionT<Scalar>> payoffs;
  payoffs.reserve(success.size());
  for (Eigen::Index i = 0; i < success.rows(); ++i)
    for (Eigen::Index j = 0; j < success.cols(); ++j) {
      if (success(i, j) != Scalar(0) && success(i, j) != Scalar(1))
        fail(errc::invalid_argument, "success matrix entries must be 0 or 1");
      payoffs.push_back(point_mass<Scalar>(success(i, j) == Scalar(0) ? 1 : 2, 2));
    }
  const GameT<Scalar> game =
      assemble_game<Scalar>(success.rows(), success.cols(), 1, std::move(payoffs));
  const EquilibriumT<Scalar> eq = fictitious_play(game, iterations);
  const Scalar value = mean(eq.assurances.front()) - Scalar(1);
  return std::clamp(value, Scalar(0), Scalar(1));
}

template <typename Scalar = double>
struct StageSolution {
  LossDistributionT<Scalar> payoff;  // converged I(n)
  EquilibriumT<Scalar> equilibrium;
  int fixpoint_rounds{0};
  Scalar residual{0};
  // diagnostic: residuals were non-increasing over the final rounds (up to
  // three). A false value flags an oscillating approach, it is not an error.
  bool residual_monotone{true};
};

/// Solves the stages outward from the asset. Each stage's payoff I(n) is the
/// fixed point of: build the 2x2 stage game with the current iterate, solve
/// it by fictitious play, take the assurance as the next iterate. Seeded with
/// I(n-1); throws NoConvergence when the round cap is hit first.
template <typename Scalar>
std::vector<StageSolution<Scalar>> solve_sequential_apt(
    const std::vector<StageDynamics<Scalar>>& stages, const LossDistributionT<Scalar>& initial,
    Eigen::Index fp_iterations = 1000, Scalar fixpoint_tol = Scalar(1e-6),
    int max_fixpoint_rounds = 100) {
  if (stages.empty()) fail(errc::invalid_argument, "need at least one stage");
  if (max_fixpoint_rounds < 1) fail(errc::invalid_argument, "need at least one fixpoint round");
  validate(initial);
  std::vector<StageSolution<Scalar>> solutions;
  LossDistributionT<Scalar> prev = initial;  // I(n-1), starting from I(0)
  for (std::size_t n = 0; n < stages.size(); ++n) {
    LossDistributionT<Scalar> cur = prev;
    StageSolution<Scalar> sol;
    bool converged = false;
    std::vector<Scalar> recent_residuals;
    for (int round = 1; round <= max_fixpoint_rounds; ++round) {
      AptStageSpecT<Scalar> spec{static_cast<int>(n + 1), stages[n].penetrate_success,
                                 stages[n].stay_success, prev, cur};
      const GameT<Scalar> game = stage_game_matrix(spec);
      EquilibriumT<Scalar> eq = fictitious_play(game, fp_iterations);
      LossDistributionT<Scalar> next = eq.assurances.front();
      sol.residual = sup_distance(next, cur);
      sol.fixpoint_rounds = round;
      sol.equilibrium = std::move(eq);
      cur = std::move(next);
      recent_residuals.push_back(sol.residual);
      if (recent_residuals.size() > 3) recent_residuals.erase(recent_residuals.begin());
      if (sol.residual < fixpoint_tol) {
        converged = true;
        break;
      }
    }
    for (std::size_t r = 1; r < recent_residuals.size(); ++r)
      if (recent_residuals[r] > recent_residuals[r - 1]) sol.residual_monotone = false;
    if (!converged)
      fail(errc::no_convergence,
           "stage " + std::to_string(n + 1) + " residual " + std::to_string(sol.residual) +
               " after " + std::to_string(max_fixpoint_rounds) + " rounds");
    sol.payoff = cur;
    prev = cur;
    solutions.push_back(std::move(sol));
  }
  return solutions;
}

/// Static stage-distance game: payoffs are loss distributions over stage
/// indices 1..stage_count (stage 1 = outermost perimeter). Solved with the
/// ordinary fictitious play, which keeps mass away from the asset.
template <typename Scalar>
GameT<Scalar> static_apt_game(Eigen::Index defenses, Eigen::Index attacks,
                              Eigen::Index stage_count,
                              std::vector<LossDistributionT<Scalar>> payoffs,
                              std::vector<std::string> defense_labels = {},
                              std::vector<std::string> attack_labels = {}) {
  if (stage_count < 1) fail(errc::invalid_argument, "need at least one stage");
  for (const auto& d : payoffs)
    if (d.support_max() != stage_count)
      fail(errc::support_mismatch, "stage payoff on support 1.." +
                                       std::to_string(d.support_max()) + ", expected 1.." +
                                       std::to_string(stage_count));
  return assemble_game<Scalar>(defenses, attacks, 1, std::move(payoffs),
                               std::move(defense_labels), std::move(attack_labels),
                               {"stage distance"});
}

}  // namespace riskgame
