#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "riskgame/errors.hpp"
#include "riskgame/game.hpp"
#include "riskgame/loss_distribution.hpp"
#include "riskgame/preference.hpp"

namespace riskgame {

/// Threat placement on the rank-scaled risk matrix: ranks run 1..m per axis
/// (1 = least severe), the zone flags whether the threat demands action.
struct ThreatRanking {
  struct Entry {
    std::string id;
    int impact_rank{0};
    int likelihood_rank{0};
    bool critical{false};
  };
  std::vector<Entry> entries;
};

/// Default critical region: the upper-right half of the rank matrix.
inline bool default_critical_zone(int impact_rank, int likelihood_rank, int threat_count) {
  return impact_rank + likelihood_rank > threat_count;
}

using CriticalPredicate = std::function<bool(int impact_rank, int likelihood_rank, int threat_count)>;

/// Ranks threats separately by impact and likelihood under the tail ordering
/// and applies the critical-zone predicate to the rank pair.
template <typename Scalar>
ThreatRanking rank_threats(std::span<const LossDistributionT<Scalar>> impacts,
                           std::span<const LossDistributionT<Scalar>> likelihoods,
                           std::span<const std::string> ids = {},
                           const CriticalPredicate& critical = {}) {
  if (impacts.empty() || impacts.size() != likelihoods.size())
    fail(errc::invalid_argument, "need one impact and one likelihood per threat");
  const auto m = static_cast<int>(impacts.size());
  if (!ids.empty() && ids.size() != impacts.size())
    fail(errc::invalid_argument, "need one id per threat");
  const std::vector<int> impact_ranks = ranks_from_order(sort_by_preference(impacts));
  const std::vector<int> likelihood_ranks = ranks_from_order(sort_by_preference(likelihoods));
  const CriticalPredicate zone = critical ? critical : default_critical_zone;
  ThreatRanking ranking;
  for (int k = 0; k < m; ++k) {
    ThreatRanking::Entry entry;
    entry.id = ids.empty() ? "T" + std::to_string(k + 1) : ids[k];
    entry.impact_rank = impact_ranks[k];
    entry.likelihood_rank = likelihood_ranks[k];
    entry.critical = zone(entry.impact_rank, entry.likelihood_rank, m);
    ranking.entries.push_back(std::move(entry));
  }
  return ranking;
}

/// Which defense works against which threat.
struct ControlRelation {
  std::vector<std::string> defenses;
  std::vector<std::string> threats;
  std::set<std::pair<std::string, std::string>> effective;  // (defense, threat)
};

enum class HittingSetMode { cardinality, subset_minimal };

namespace detail {

inline bool hits_all(const std::vector<std::uint64_t>& candidate_sets, std::uint64_t subset) {
  for (std::uint64_t set : candidate_sets)
    if ((set & subset) == 0) return false;
  return true;
}

}  // namespace detail

/// Minimal hitting set over the per-threat candidate countermeasure sets.
/// Cardinality mode is exact up to 20 defenses (greedy with unit-set
/// reduction beyond that); subset-minimal mode prunes a cover until no
/// element can be removed. Deterministic: prefers low defense indices.
inline std::vector<std::string> minimal_hitting_set(const ControlRelation& rel,
                                                    HittingSetMode mode) {
  if (rel.defenses.empty()) fail(errc::invalid_argument, "no defenses declared");
  const auto n = rel.defenses.size();
  if (n > 64) fail(errc::invalid_argument, "hitting sets support at most 64 defenses");
  std::map<std::string, std::size_t> defense_index;
  for (std::size_t i = 0; i < n; ++i) defense_index[rel.defenses[i]] = i;

  std::vector<std::uint64_t> candidate_sets;
  for (const auto& threat : rel.threats) {
    std::uint64_t mask = 0;
    for (const auto& [defense, covered] : rel.effective) {
      if (covered != threat) continue;
      auto it = defense_index.find(defense);
      if (it == defense_index.end())
        fail(errc::invalid_argument, "pair references undeclared defense " + defense);
      mask |= std::uint64_t{1} << it->second;
    }
    if (mask == 0) fail(errc::uncoverable_threat, "no effective defense against threat " + threat);
    candidate_sets.push_back(mask);
  }
  for (const auto& [defense, threat] : rel.effective)
    if (std::find(rel.threats.begin(), rel.threats.end(), threat) == rel.threats.end())
      fail(errc::invalid_argument, "pair references undeclared threat " + threat);

  auto to_labels = [&](std::uint64_t subset) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
      if (subset & (std::uint64_t{1} << i)) out.push_back(rel.defenses[i]);
    return out;
  };

  if (candidate_sets.empty()) return {};

  std::uint64_t chosen = 0;
  if (mode == HittingSetMode::cardinality && n <= 20) {
    // exact: one pass over all subsets, keeping the smallest hitting one
    // (ties resolved toward low defense indices by the numeric scan order)
    int best_size = static_cast<int>(n) + 1;
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << n); ++subset) {
      if (std::popcount(subset) >= best_size) continue;
      if (detail::hits_all(candidate_sets, subset)) {
        chosen = subset;
        best_size = std::popcount(subset);
      }
    }
  } else {
    // forced unit sets first, then greedy max coverage
    for (std::uint64_t set : candidate_sets)
      if (std::popcount(set) == 1) chosen |= set;
    auto uncovered = [&]() {
      std::vector<std::uint64_t> rest;
      for (std::uint64_t set : candidate_sets)
        if ((set & chosen) == 0) rest.push_back(set);
      return rest;
    };
    std::vector<std::uint64_t> rest = uncovered();
    while (!rest.empty()) {
      std::size_t best = 0;
      std::size_t best_cover = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        if (chosen & bit) continue;
        std::size_t cover = 0;
        for (std::uint64_t set : rest)
          if (set & bit) ++cover;
        if (cover > best_cover) {
          best_cover = cover;
          best = i;
        }
      }
      chosen |= std::uint64_t{1} << best;
      rest = uncovered();
    }
    // prune; also tightens the greedy cardinality answer
    for (std::size_t i = n; i-- > 0;) {
      const std::uint64_t without = chosen & ~(std::uint64_t{1} << i);
      if (((chosen >> i) & 1u) && detail::hits_all(candidate_sets, without)) chosen = without;
    }
  }

  if (mode == HittingSetMode::subset_minimal) {
    for (std::size_t i = n; i-- > 0;) {
      const std::uint64_t without = chosen & ~(std::uint64_t{1} << i);
      if (((chosen >> i) & 1u) && detail::hits_all(candidate_sets, without)) chosen = without;
    }
  }
  return to_labels(chosen);
}

/// Poisson action plan: event times inside [0, horizon] with exponential
/// inter-arrival of rate p (mean 1/p per time unit).
struct Schedule {
  std::string action;
  double frequency{0};
  std::string time_unit{"day"};
  double horizon{0};
  std::uint64_t seed{0};
  std::vector<double> event_times;
};

inline Schedule schedule_actions(double frequency, double horizon, std::uint64_t seed,
                                 std::string action = "action", std::string time_unit = "day") {
  if (!(frequency >= 0.0) || frequency > 1.0)
    fail(errc::invalid_frequency, "frequency must lie in [0,1], got " + std::to_string(frequency));
  if (!(horizon > 0.0)) fail(errc::invalid_argument, "horizon must be positive");
  Schedule schedule{std::move(action), frequency, std::move(time_unit), horizon, seed, {}};
  if (frequency == 0.0) return schedule;
  std::mt19937_64 engine(seed);
  double t = 0.0;
  for (;;) {
    // 53-bit uniform kept strictly inside (0,1) for a portable, seeded stream
    const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
    t += -std::log(u) / frequency;
    if (t > horizon) break;
    schedule.event_times.push_back(t);
  }
  return schedule;
}

/// Exact one-sided comparison of two Poisson incident rates. Under the
/// boundary of H0 (past rate equal to the new rate), the past count given the
/// total is Binomial(K, past_period / (past_period + new_period)); the
/// p-value is that binomial's upper tail at the observed past count.
struct RateTestResult {
  std::int64_t past_count{0};
  std::int64_t new_count{0};
  double past_period{0};
  double new_period{0};
  double alpha{0};
  double p_value{1};
  bool rejected{false};
};

inline RateTestResult rate_ratio_test(std::int64_t past_count, std::int64_t new_count,
                                      double past_period, double new_period, double alpha) {
  if (past_count < 0 || new_count < 0)
    fail(errc::invalid_argument, "incident counts must be nonnegative");
  if (!(past_period > 0.0) || !(new_period > 0.0))
    fail(errc::invalid_period, "observation periods must be positive");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    fail(errc::invalid_alpha, "alpha must lie strictly between 0 and 1");
  RateTestResult result{past_count, new_count, past_period, new_period, alpha, 1.0, false};
  const std::int64_t total = past_count + new_count;
  if (total > 0) {
    const long double pi0 = static_cast<long double>(past_period) /
                            (static_cast<long double>(past_period) + new_period);
    const long double log_p = std::log(pi0);
    const long double log_1p = std::log(1.0L - pi0);
    long double tail = 0.0L;
    for (std::int64_t k = past_count; k <= total; ++k) {
      const long double log_pmf = std::lgammal(static_cast<long double>(total) + 1) -
                                  std::lgammal(static_cast<long double>(k) + 1) -
                                  std::lgammal(static_cast<long double>(total - k) + 1) +
                                  k * log_p + (total - k) * log_1p;
      tail += std::exp(log_pmf);
    }
    result.p_value = static_cast<double>(std::min(tail, 1.0L));
  }
  result.rejected = result.p_value < alpha;
  return result;
}

enum class ControlKind { static_control, dynamic_control };

inline const char* control_kind_name(ControlKind k) noexcept {
  return k == ControlKind::static_control ? "static" : "dynamic";
}

/// Actionable reading of an equilibrium: which controls to implement (static)
/// or to repeat at which frequency (dynamic), plus the residual-risk summary
/// per goal.
struct EquilibriumReport {
  struct ControlEntry {
    std::string defense;
    ControlKind kind{ControlKind::static_control};
    double frequency{0};
  };
  struct GoalSummary {
    std::string goal;
    double mean{0};       // classical risk = damage x likelihood
    double variance{0};
    Eigen::Index quantile_95{0};
    Eigen::Index tail_category{0};
    double tail_probability{0};  // P(loss >= tail_category)
  };

  std::vector<ControlEntry> controls;  // descending frequency, above threshold
  std::vector<std::pair<std::string, double>> worst_case_attacks;
  std::vector<GoalSummary> goals;
  double frequency_threshold{1e-6};
};

/// Builds the report from an equilibrium. The attacker profile is one worst
/// case among possibly many; tail_category defaults to support_max - 1.
template <typename Scalar>
EquilibriumReport interpret_equilibrium(const EquilibriumT<Scalar>& eq,
                                        std::span<const std::string> defense_labels,
                                        std::span<const std::string> attack_labels,
                                        std::span<const std::string> goal_labels,
                                        const std::map<std::string, ControlKind>& control_kinds,
                                        double frequency_threshold = 1e-6,
                                        Eigen::Index tail_category = -1) {
  if (static_cast<Eigen::Index>(defense_labels.size()) != eq.optimal_defense.size() ||
      static_cast<Eigen::Index>(attack_labels.size()) != eq.optimal_attack.size() ||
      goal_labels.size() != eq.assurances.size())
    fail(errc::dimension_mismatch, "labels do not match the equilibrium dimensions");
  EquilibriumReport report;
  report.frequency_threshold = frequency_threshold;
  for (Eigen::Index i = 0; i < eq.optimal_defense.size(); ++i) {
    const double frequency = static_cast<double>(eq.optimal_defense[i]);
    if (frequency <= frequency_threshold) continue;
    auto it = control_kinds.find(defense_labels[i]);
    if (it == control_kinds.end())
      fail(errc::invalid_argument, "no control kind declared for defense " + defense_labels[i]);
    report.controls.push_back({defense_labels[i], it->second, frequency});
  }
  std::stable_sort(report.controls.begin(), report.controls.end(),
                   [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  for (Eigen::Index j = 0; j < eq.optimal_attack.size(); ++j)
    if (eq.optimal_attack[j] > frequency_threshold)
      report.worst_case_attacks.emplace_back(attack_labels[j],
                                             static_cast<double>(eq.optimal_attack[j]));
  for (std::size_t g = 0; g < eq.assurances.size(); ++g) {
    const auto& assurance = eq.assurances[g];
    EquilibriumReport::GoalSummary summary;
    summary.goal = goal_labels[g];
    summary.mean = static_cast<double>(mean(assurance));
    summary.variance = static_cast<double>(variance(assurance));
    summary.quantile_95 = quantile(assurance, Scalar(0.95));
    summary.tail_category =
        tail_category > 0 ? tail_category : std::max<Eigen::Index>(1, assurance.support_max() - 1);
    if (summary.tail_category > assurance.support_max())
      fail(errc::invalid_argument, "tail category beyond the support");
    summary.tail_probability =
        summary.tail_category == 1
            ? 1.0
            : 1.0 - static_cast<double>(cdf(assurance, summary.tail_category - 1));
    report.goals.push_back(std::move(summary));
  }
  return report;
}

}  // namespace riskgame
