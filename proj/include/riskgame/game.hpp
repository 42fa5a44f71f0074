#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskgame/errors.hpp"
#include "riskgame/loss_distribution.hpp"
#include "riskgame/preference.hpp"

namespace riskgame {

/// Zero-sum matrix game with distribution-valued payoffs: defender strategies
/// x attacker strategies x security goals, every cell a loss distribution on
/// one common support. The defender minimizes losses under the tail ordering,
/// the attacker maximizes.
template <typename Scalar = double>
struct GameT {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

  Eigen::Index defenses{0};
  Eigen::Index attacks{0};
  Eigen::Index goals{0};
  std::vector<LossDistributionT<Scalar>> payoffs;  // ((i * attacks) + j) * goals + g
  std::vector<std::string> defense_labels;
  std::vector<std::string> attack_labels;
  std::vector<std::string> goal_labels;
  Vector goal_weights;  // normalized to sum 1

  const LossDistributionT<Scalar>& payoff(Eigen::Index i, Eigen::Index j,
                                          Eigen::Index goal = 0) const {
    return payoffs[(i * attacks + j) * goals + goal];
  }
  LossDistributionT<Scalar>& payoff(Eigen::Index i, Eigen::Index j, Eigen::Index goal = 0) {
    return payoffs[(i * attacks + j) * goals + goal];
  }
  Eigen::Index support_max() const { return payoffs.front().support_max(); }
};

using Game = GameT<double>;

/// Equilibrium artefacts: the optimal defense mix, one worst-case attack mix,
/// and the per-goal assurance distributions on the truncated support.
template <typename Scalar = double>
struct EquilibriumT {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

  Vector optimal_defense;
  Vector optimal_attack;
  std::vector<LossDistributionT<Scalar>> assurances;
  Eigen::Index iterations{0};
  Eigen::Index cutoff{0};
};

using Equilibrium = EquilibriumT<double>;

namespace detail {

inline std::vector<std::string> default_labels(const char* prefix, Eigen::Index count) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (Eigen::Index i = 1; i <= count; ++i) labels.push_back(prefix + std::to_string(i));
  return labels;
}

template <typename Scalar>
typename GameT<Scalar>::Vector normalized_weights(std::span<const Scalar> weights,
                                                  Eigen::Index goals) {
  using Vector = typename GameT<Scalar>::Vector;
  if (weights.empty()) return Vector::Constant(goals, Scalar(1) / static_cast<Scalar>(goals));
  if (static_cast<Eigen::Index>(weights.size()) != goals)
    fail(errc::invalid_weights, "need one weight per goal");
  Vector w(goals);
  Scalar total = 0;
  for (Eigen::Index g = 0; g < goals; ++g) {
    if (!(weights[g] >= Scalar(0))) fail(errc::invalid_weights, "negative goal weight");
    w[g] = weights[g];
    total += weights[g];
  }
  if (!(total > Scalar(0))) fail(errc::invalid_weights, "goal weights must not all be zero");
  return w / total;
}

template <typename Scalar>
void check_probability_vector(const typename GameT<Scalar>::Vector& v, const char* name) {
  if (v.size() < 1) fail(errc::dimension_mismatch, std::string(name) + " is empty");
  Scalar total = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= Scalar(-1e-12)))
      fail(errc::invalid_argument, std::string(name) + " has a negative entry");
    total += v[i];
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-6)
    fail(errc::invalid_argument, std::string(name) + " does not sum to 1");
}

}  // namespace detail

/// Validates the payoff grid and fills in default labels and uniform weights.
template <typename Scalar>
GameT<Scalar> assemble_game(Eigen::Index defenses, Eigen::Index attacks, Eigen::Index goals,
                            std::vector<LossDistributionT<Scalar>> payoffs,
                            std::vector<std::string> defense_labels = {},
                            std::vector<std::string> attack_labels = {},
                            std::vector<std::string> goal_labels = {},
                            std::span<const Scalar> goal_weights = {}) {
  if (defenses < 1 || attacks < 1 || goals < 1)
    fail(errc::invalid_argument, "game dimensions must be >= 1");
  if (static_cast<Eigen::Index>(payoffs.size()) != defenses * attacks * goals)
    fail(errc::incomplete_grid,
         "expected " + std::to_string(defenses * attacks * goals) + " payoff distributions, got " +
             std::to_string(payoffs.size()));
  const Eigen::Index a = payoffs.front().support_max();
  const DistributionKind kind = payoffs.front().kind;
  for (const auto& d : payoffs) {
    validate(d);
    if (d.support_max() != a)
      fail(errc::support_mismatch, "payoff with support_max " + std::to_string(d.support_max()) +
                                       " in a game on support 1.." + std::to_string(a));
    if (d.kind != kind) fail(errc::support_mismatch, "payoffs mix distribution kinds");
  }
  if (defense_labels.empty()) defense_labels = detail::default_labels("d", defenses);
  if (attack_labels.empty()) attack_labels = detail::default_labels("a", attacks);
  if (goal_labels.empty()) goal_labels = detail::default_labels("g", goals);
  if (static_cast<Eigen::Index>(defense_labels.size()) != defenses ||
      static_cast<Eigen::Index>(attack_labels.size()) != attacks ||
      static_cast<Eigen::Index>(goal_labels.size()) != goals)
    fail(errc::invalid_argument, "label lists do not match the game dimensions");
  GameT<Scalar> g{defenses,
                  attacks,
                  goals,
                  std::move(payoffs),
                  std::move(defense_labels),
                  std::move(attack_labels),
                  std::move(goal_labels),
                  detail::normalized_weights<Scalar>(goal_weights, goals)};
  return g;
}

/// Collapses a multi-goal game into a single-goal one by mixing each cell's
/// goal distributions with the normalized goal weights.
template <typename Scalar>
GameT<Scalar> scalarize(const GameT<Scalar>& g) {
  if (g.goals == 1) return g;
  std::vector<LossDistributionT<Scalar>> combined;
  combined.reserve(g.defenses * g.attacks);
  std::vector<Scalar> weights(g.goal_weights.data(), g.goal_weights.data() + g.goals);
  for (Eigen::Index i = 0; i < g.defenses; ++i)
    for (Eigen::Index j = 0; j < g.attacks; ++j) {
      std::vector<LossDistributionT<Scalar>> cell;
      cell.reserve(g.goals);
      for (Eigen::Index goal = 0; goal < g.goals; ++goal) cell.push_back(g.payoff(i, j, goal));
      combined.push_back(weighted_mixture(std::span<const LossDistributionT<Scalar>>(cell),
                                          std::span<const Scalar>(weights)));
    }
  return assemble_game<Scalar>(g.defenses, g.attacks, 1, std::move(combined), g.defense_labels,
                               g.attack_labels, {"combined"});
}

/// Bilinear mixture sum_ij x_i y_j payoff(i,j,goal) under mixed strategies.
template <typename Scalar>
LossDistributionT<Scalar> mixture_payoff(const GameT<Scalar>& g,
                                         const typename GameT<Scalar>::Vector& defense_mix,
                                         const typename GameT<Scalar>::Vector& attack_mix,
                                         Eigen::Index goal = 0) {
  if (defense_mix.size() != g.defenses || attack_mix.size() != g.attacks)
    fail(errc::dimension_mismatch, "strategy vector lengths do not match the game");
  if (goal < 0 || goal >= g.goals) fail(errc::dimension_mismatch, "goal index out of range");
  detail::check_probability_vector<Scalar>(defense_mix, "defense mix");
  detail::check_probability_vector<Scalar>(attack_mix, "attack mix");
  typename LossDistributionT<Scalar>::Vector acc =
      LossDistributionT<Scalar>::Vector::Zero(g.support_max());
  for (Eigen::Index i = 0; i < g.defenses; ++i) {
    if (defense_mix[i] == Scalar(0)) continue;
    for (Eigen::Index j = 0; j < g.attacks; ++j) {
      const Scalar w = defense_mix[i] * attack_mix[j];
      if (w == Scalar(0)) continue;
      acc += w * g.payoff(i, j, goal).masses;
    }
  }
  acc /= acc.sum();
  return LossDistributionT<Scalar>{std::move(acc), Scalar(0), g.payoffs.front().kind, 0};
}

namespace detail {

template <typename Scalar>
GameT<Scalar> truncate_game(const GameT<Scalar>& g, Eigen::Index cutoff) {
  if (cutoff < 1 || cutoff > g.support_max())
    fail(errc::invalid_cutoff, "cutoff " + std::to_string(cutoff) + " outside 1.." +
                                   std::to_string(g.support_max()));
  GameT<Scalar> out = g;
  for (auto& d : out.payoffs) d = truncate(d, cutoff);
  return out;
}

}  // namespace detail

/// Brown-Robinson fictitious play on the scalarized, truncated game,
/// alternating each round: the defender picks the row whose running average
/// distribution against the attacker's history is minimal under the tail
/// ordering, then the attacker picks the maximal column average against the
/// defender's history including that move. Ties break toward the lowest
/// index, so the iteration is deterministic for fixed inputs.
template <typename Scalar>
EquilibriumT<Scalar> fictitious_play(const GameT<Scalar>& g, Eigen::Index iterations = 1000,
                                     Eigen::Index cutoff = -1,
                                     Scalar tol = Scalar(kPreferenceTolerance)) {
  if (iterations < 1) fail(errc::invalid_argument, "need at least one iteration");
  if (cutoff < 0) cutoff = g.support_max();
  const GameT<Scalar> scalar_game = detail::truncate_game(scalarize(g), cutoff);
  const Eigen::Index n = scalar_game.defenses;
  const Eigen::Index m = scalar_game.attacks;
  const Eigen::Index a = scalar_game.support_max();

  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Matrix defense_sums = Matrix::Zero(n, a);  // row i: sum of payoffs(i, j_s) over history
  Matrix attack_sums = Matrix::Zero(m, a);   // row j: sum of payoffs(i_s, j) over history
  Eigen::VectorXi defense_counts = Eigen::VectorXi::Zero(n);
  Eigen::VectorXi attack_counts = Eigen::VectorXi::Zero(m);

  for (Eigen::Index t = 0; t < iterations; ++t) {
    Eigen::Index best_row = 0;
    const Scalar row_tol = tol * static_cast<Scalar>(t);  // sums hold t plays
    for (Eigen::Index i = 1; i < n; ++i)
      if (tail_compare(defense_sums.row(i), defense_sums.row(best_row), row_tol) < 0)
        best_row = i;
    defense_counts[best_row] += 1;
    for (Eigen::Index j = 0; j < m; ++j)
      attack_sums.row(j) += scalar_game.payoff(best_row, j).masses.transpose();

    Eigen::Index best_col = 0;
    const Scalar col_tol = tol * static_cast<Scalar>(t + 1);
    for (Eigen::Index j = 1; j < m; ++j)
      if (tail_compare(attack_sums.row(j), attack_sums.row(best_col), col_tol) > 0)
        best_col = j;
    attack_counts[best_col] += 1;
    for (Eigen::Index i = 0; i < n; ++i)
      defense_sums.row(i) += scalar_game.payoff(i, best_col).masses.transpose();
  }

  EquilibriumT<Scalar> eq;
  eq.optimal_defense =
      defense_counts.template cast<Scalar>() / static_cast<Scalar>(iterations);
  eq.optimal_attack = attack_counts.template cast<Scalar>() / static_cast<Scalar>(iterations);
  eq.iterations = iterations;
  eq.cutoff = cutoff;
  const GameT<Scalar> truncated = detail::truncate_game(g, cutoff);
  eq.assurances.reserve(g.goals);
  for (Eigen::Index goal = 0; goal < g.goals; ++goal)
    eq.assurances.push_back(
        mixture_payoff(truncated, eq.optimal_defense, eq.optimal_attack, goal));
  return eq;
}

/// Exact one-pass solution of a 1xm or nx1 game: the attacker picks the
/// tail-maximal column, the defender the tail-minimal row.
template <typename Scalar>
EquilibriumT<Scalar> solve_degenerate(const GameT<Scalar>& g,
                                      Scalar tol = Scalar(kPreferenceTolerance)) {
  if (g.defenses != 1 && g.attacks != 1)
    fail(errc::invalid_argument, "degenerate solver needs a 1xm or nx1 game");
  const GameT<Scalar> scalar_game = scalarize(g);
  using Vector = typename GameT<Scalar>::Vector;
  Eigen::Index best_row = 0;
  Eigen::Index best_col = 0;
  if (g.defenses == 1) {
    for (Eigen::Index j = 1; j < g.attacks; ++j)
      if (tail_compare(scalar_game.payoff(0, j).masses, scalar_game.payoff(0, best_col).masses,
                       tol) > 0)
        best_col = j;
  } else {
    for (Eigen::Index i = 1; i < g.defenses; ++i)
      if (tail_compare(scalar_game.payoff(i, 0).masses, scalar_game.payoff(best_row, 0).masses,
                       tol) < 0)
        best_row = i;
  }
  EquilibriumT<Scalar> eq;
  eq.optimal_defense = Vector::Zero(g.defenses);
  eq.optimal_defense[best_row] = Scalar(1);
  eq.optimal_attack = Vector::Zero(g.attacks);
  eq.optimal_attack[best_col] = Scalar(1);
  eq.iterations = 1;
  eq.cutoff = g.support_max();
  eq.assurances.reserve(g.goals);
  for (Eigen::Index goal = 0; goal < g.goals; ++goal)
    eq.assurances.push_back(mixture_payoff(g, eq.optimal_defense, eq.optimal_attack, goal));
  return eq;
}

}  // namespace riskgame
