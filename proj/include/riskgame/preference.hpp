#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "riskgame/errors.hpp"
#include "riskgame/loss_distribution.hpp"

namespace riskgame {

/// Outcome of a pairwise comparison: 0 = indifferent, 1 = first argument
/// preferred (less severe), 2 = second argument preferred.
struct PreferenceResult {
  int verdict{0};
  std::optional<Eigen::Index> decided_at_category;
};

constexpr double kPreferenceTolerance = 1e-9;

/// Tail-lexicographic comparison of two mass vectors: scan categories from
/// the top of the support downward and decide at the first one where the
/// masses differ by more than tol. Returns -1 when f carries the smaller
/// mass there (f is the lesser loss), +1 when g does, 0 when no category
/// separates them. The vectors do not need to be normalized, which lets
/// fictitious play compare running sums directly.
template <typename DerivedF, typename DerivedG, typename Scalar = typename DerivedF::Scalar>
int tail_compare(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
                 Scalar tol = Scalar(kPreferenceTolerance),
                 Eigen::Index* decided_at_category = nullptr) {
  if (f.size() != g.size()) fail(errc::support_mismatch, "comparing different supports");
  for (Eigen::Index k = f.size() - 1; k >= 0; --k) {
    const Scalar diff = f[k] - g[k];
    if (diff > tol || diff < -tol) {
      if (decided_at_category != nullptr) *decided_at_category = k + 1;
      return diff < Scalar(0) ? -1 : 1;
    }
  }
  return 0;
}

/// Decides which of two loss distributions is preferable (less severe)
/// under the tail ordering.
template <typename Scalar>
PreferenceResult prefer(const LossDistributionT<Scalar>& f, const LossDistributionT<Scalar>& g,
                        Scalar tol = Scalar(kPreferenceTolerance)) {
  if (f.support_max() != g.support_max())
    fail(errc::support_mismatch, "distributions live on different supports");
  if (f.kind != g.kind)
    fail(errc::support_mismatch, "distributions have different kinds");
  Eigen::Index at = 0;
  const int cmp = tail_compare(f.masses, g.masses, tol, &at);
  if (cmp == 0) return {0, std::nullopt};
  return {cmp < 0 ? 1 : 2, at};
}

/// Category-wise mixture sum_i w_i * ds[i] with the weights normalized to 1.
template <typename Scalar>
LossDistributionT<Scalar> weighted_mixture(std::span<const LossDistributionT<Scalar>> ds,
                                           std::span<const Scalar> weights) {
  if (ds.empty() || ds.size() != weights.size())
    fail(errc::invalid_weights, "need one nonnegative weight per distribution");
  Scalar total = 0;
  for (Scalar w : weights) {
    if (!(w >= Scalar(0))) fail(errc::invalid_weights, "negative weight");
    total += w;
  }
  if (!(total > Scalar(0))) fail(errc::invalid_weights, "weights must not all be zero");
  const Eigen::Index a = ds.front().support_max();
  const DistributionKind kind = ds.front().kind;
  typename LossDistributionT<Scalar>::Vector acc =
      LossDistributionT<Scalar>::Vector::Zero(a);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].support_max() != a || ds[i].kind != kind)
      fail(errc::support_mismatch, "mixture components on different supports");
    acc += (weights[i] / total) * ds[i].masses;
  }
  acc /= acc.sum();
  return LossDistributionT<Scalar>{std::move(acc), Scalar(0), kind, 0};
}

/// Multi-goal preference: compare the weighted mixtures of the two lists.
template <typename Scalar>
PreferenceResult prefer_multi(std::span<const LossDistributionT<Scalar>> fs,
                              std::span<const LossDistributionT<Scalar>> gs,
                              std::span<const Scalar> weights,
                              Scalar tol = Scalar(kPreferenceTolerance)) {
  if (fs.empty() || fs.size() != gs.size())
    fail(errc::invalid_weights, "need the same number of goals on both sides");
  if (weights.size() != fs.size())
    fail(errc::invalid_weights, "need one weight per goal");
  return prefer(weighted_mixture(fs, weights), weighted_mixture(gs, weights), tol);
}

template <typename Scalar>
PreferenceResult prefer_multi(const std::vector<LossDistributionT<Scalar>>& fs,
                              const std::vector<LossDistributionT<Scalar>>& gs,
                              const std::vector<Scalar>& weights,
                              Scalar tol = Scalar(kPreferenceTolerance)) {
  return prefer_multi(std::span<const LossDistributionT<Scalar>>(fs),
                      std::span<const LossDistributionT<Scalar>>(gs),
                      std::span<const Scalar>(weights), tol);
}

/// Stable ascending sort (least severe first). Returns the permutation:
/// order[r] is the index of the distribution of rank r+1. Insertion sort
/// keeps the comparator honest in the presence of tolerance ties.
template <typename Scalar>
std::vector<Eigen::Index> sort_by_preference(std::span<const LossDistributionT<Scalar>> ds,
                                             Scalar tol = Scalar(kPreferenceTolerance)) {
  if (ds.empty()) fail(errc::invalid_argument, "nothing to sort");
  for (const auto& d : ds)
    if (d.support_max() != ds.front().support_max() || d.kind != ds.front().kind)
      fail(errc::support_mismatch, "sorting distributions on different supports");
  std::vector<Eigen::Index> order;
  order.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Eigen::Index pos = static_cast<Eigen::Index>(order.size());
    while (pos > 0 && prefer(ds[i], ds[order[pos - 1]], tol).verdict == 1) --pos;
    order.insert(order.begin() + pos, static_cast<Eigen::Index>(i));
  }
  return order;
}

template <typename Scalar>
std::vector<Eigen::Index> sort_by_preference(const std::vector<LossDistributionT<Scalar>>& ds,
                                             Scalar tol = Scalar(kPreferenceTolerance)) {
  return sort_by_preference(std::span<const LossDistributionT<Scalar>>(ds), tol);
}

/// Rank per input index (1 = least severe) from a sort permutation.
inline std::vector<int> ranks_from_order(const std::vector<Eigen::Index>& order) {
  std::vector<int> ranks(order.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r) + 1;
  return ranks;
}

}  // namespace riskgame
