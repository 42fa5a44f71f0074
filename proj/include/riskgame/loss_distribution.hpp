#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskgame/errors.hpp"
#include "riskgame/sample_stats.hpp"

namespace riskgame {

enum class DistributionKind { categorical, discretized_continuous };

inline const char* kind_name(DistributionKind k) noexcept {
  return k == DistributionKind::categorical ? "discrete-categorical" : "discretized-continuous";
}

/// Raw expert ratings for one defense/attack/goal scenario. Ratings are loss
/// categories, always >= 1.
struct Observations {
  std::vector<int> values;
  std::string defense;
  std::string attack;
  std::string goal;
};

/// Probability mass function over integer loss categories 1..a. The payoff
/// object every other module operates on. Values are immutable by convention
/// once constructed; all operations return fresh objects.
template <typename Scalar = double>
struct LossDistributionT {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

  Vector masses;  // category k lives at index k-1
  Scalar bandwidth{0};
  DistributionKind kind{DistributionKind::categorical};
  Eigen::Index observation_count{0};

  Eigen::Index support_max() const { return masses.size(); }
  Scalar mass(Eigen::Index category) const { return masses[category - 1]; }
};

using LossDistribution = LossDistributionT<double>;

/// Discretized Gaussian kernel on integer offsets -window_radius..window_radius.
template <typename Scalar = double>
struct KernelWeightsT {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

  Scalar bandwidth{0};
  int window_radius{0};
  Vector weights;  // offset n at index n + window_radius

  Scalar weight(int offset) const { return weights[offset + window_radius]; }
};

using KernelWeights = KernelWeightsT<double>;

namespace detail {

constexpr double kMassTolerance = 1e-9;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Standard normal CDF and upper tail. erfc keeps absolute error well below
// 1e-10 and the Q-form avoids cancellation for far-tail kernel weights.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
inline double normal_upper_tail(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

}  // namespace detail

/// Throws unless `d` satisfies the mass-function invariants.
template <typename Scalar>
void validate(const LossDistributionT<Scalar>& d) {
  if (d.support_max() < 1) fail(errc::invalid_argument, "distribution needs support_max >= 1");
  Scalar total = 0;
  for (Eigen::Index k = 0; k < d.support_max(); ++k) {
    const Scalar m = d.masses[k];
    if (!(m >= Scalar(0)))
      fail(errc::invalid_argument, "negative mass at category " + std::to_string(k + 1));
    if (d.bandwidth > Scalar(0) && !(m > Scalar(0)))
      fail(errc::invalid_argument, "smoothed distribution with zero mass at category " +
                                       std::to_string(k + 1));
    total += m;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > detail::kMassTolerance)
    fail(errc::invalid_argument, "masses sum to " + std::to_string(static_cast<double>(total)));
  if (!(d.bandwidth >= Scalar(0))) fail(errc::invalid_bandwidth, "negative bandwidth");
}

/// Builds a validated distribution from an explicit mass vector.
template <typename Scalar>
LossDistributionT<Scalar> from_masses(typename LossDistributionT<Scalar>::Vector masses,
                                      Scalar bandwidth = 0,
                                      DistributionKind kind = DistributionKind::categorical,
                                      Eigen::Index observation_count = 0) {
  LossDistributionT<Scalar> d{std::move(masses), bandwidth, kind, observation_count};
  validate(d);
  return d;
}

inline LossDistribution from_masses(LossDistribution::Vector masses, double bandwidth = 0,
                                    DistributionKind kind = DistributionKind::categorical,
                                    Eigen::Index observation_count = 0) {
  return from_masses<double>(std::move(masses), bandwidth, kind, observation_count);
}

/// Degenerate distribution with all mass on one category.
template <typename Scalar = double>
LossDistributionT<Scalar> point_mass(Eigen::Index category, Eigen::Index support_max) {
  if (support_max < 1 || category < 1 || category > support_max)
    fail(errc::category_out_of_range, "point mass at " + std::to_string(category) +
                                          " on support 1.." + std::to_string(support_max));
  LossDistributionT<Scalar> d;
  d.masses = LossDistributionT<Scalar>::Vector::Zero(support_max);
  d.masses[category - 1] = Scalar(1);
  return d;
}

/// Relative-frequency histogram of the ratings on categories 1..support_max.
template <typename Scalar = double>
LossDistributionT<Scalar> build_empirical(const Observations& obs, Eigen::Index support_max,
                                          DistributionKind kind = DistributionKind::categorical) {
  if (obs.values.empty()) fail(errc::empty_observations, "no ratings to build a distribution");
  if (support_max < 1) fail(errc::invalid_argument, "support_max must be >= 1");
  LossDistributionT<Scalar> d;
  d.masses = LossDistributionT<Scalar>::Vector::Zero(support_max);
  for (int v : obs.values) {
    if (v < 1 || v > support_max)
      fail(errc::category_out_of_range,
           "rating " + std::to_string(v) + " outside 1.." + std::to_string(support_max));
    d.masses[v - 1] += Scalar(1);
  }
  d.masses /= static_cast<Scalar>(obs.values.size());
  d.kind = kind;
  d.observation_count = static_cast<Eigen::Index>(obs.values.size());
  return d;
}

/// Kernel weights K_h(n) = Phi((n+1/2)/h) - Phi((n-1/2)/h) for |n| <= window_radius.
template <typename Scalar = double>
KernelWeightsT<Scalar> discrete_kernel(Scalar h, int window_radius) {
  if (!(h > Scalar(0)) || !std::isfinite(static_cast<double>(h)))
    fail(errc::invalid_bandwidth, "bandwidth must be positive, got " +
                                      std::to_string(static_cast<double>(h)));
  if (window_radius < 1) fail(errc::invalid_argument, "window_radius must be >= 1");
  KernelWeightsT<Scalar> k;
  k.bandwidth = h;
  k.window_radius = window_radius;
  k.weights = KernelWeightsT<Scalar>::Vector::Zero(2 * window_radius + 1);
  const double hd = static_cast<double>(h);
  k.weights[window_radius] = static_cast<Scalar>(std::erf(0.5 / hd * detail::kInvSqrt2));
  for (int n = 1; n <= window_radius; ++n) {
    const double w = detail::normal_upper_tail((n - 0.5) / hd) -
                     detail::normal_upper_tail((n + 0.5) / hd);
    k.weights[window_radius + n] = static_cast<Scalar>(w);
    k.weights[window_radius - n] = static_cast<Scalar>(w);
  }
  return k;
}

/// Window radius that captures essentially all kernel mass for support 1..a.
template <typename Scalar>
int default_window_radius(Eigen::Index support_max, Scalar h) {
  const int by_bandwidth = static_cast<int>(std::ceil(6.0 * static_cast<double>(h)));
  return std::max(static_cast<int>(support_max), std::max(1, by_bandwidth));
}

/// Convolves the unsmoothed distribution with the discrete Gaussian kernel,
/// restricted to 1..support_max and renormalized. The result has strictly
/// positive mass everywhere; far-tail kernel weights underflow double
/// precision, so masses are clamped to the smallest normal value first.
template <typename Scalar>
LossDistributionT<Scalar> smooth(const LossDistributionT<Scalar>& d, Scalar h) {
  if (d.bandwidth != Scalar(0))
    fail(errc::invalid_argument, "smooth expects an unsmoothed input distribution");
  validate(d);
  const KernelWeightsT<Scalar> kernel =
      discrete_kernel(h, default_window_radius(d.support_max(), h));
  const Eigen::Index a = d.support_max();
  typename LossDistributionT<Scalar>::Vector out =
      LossDistributionT<Scalar>::Vector::Zero(a);
  for (Eigen::Index k = 0; k < a; ++k) {
    Scalar acc = 0;
    for (Eigen::Index j = 0; j < a; ++j) acc += d.masses[j] * kernel.weight(static_cast<int>(k - j));
    out[k] = acc;
  }
  out = out.cwiseMax(std::numeric_limits<Scalar>::min());
  out /= out.sum();
  LossDistributionT<Scalar> result{std::move(out), h, d.kind, d.observation_count};
  return result;
}

/// Silverman's rule of thumb, treating the ratings as a continuous sample:
/// h = 0.9 * min(sd, IQR/1.34) * n^(-1/5). Falls back to sd when the IQR is
/// zero but the sample still has spread.
template <typename Scalar = double>
Scalar silverman_bandwidth(const Observations& obs) {
  if (obs.values.size() < 2)
    fail(errc::degenerate_sample, "need at least two ratings for a bandwidth rule");
  std::vector<Scalar> values(obs.values.begin(), obs.values.end());
  const Scalar sd = sample_sd<Scalar>(values);
  if (!(sd > Scalar(0)))
    fail(errc::degenerate_sample, "all ratings identical; supply a bandwidth explicitly");
  std::sort(values.begin(), values.end());
  const Scalar iqr = sample_iqr<Scalar>(values);
  Scalar lo = std::min(sd, iqr / Scalar(1.34));
  if (!(lo > Scalar(0))) lo = sd;
  return Scalar(0.9) * lo *
         std::pow(static_cast<Scalar>(values.size()), Scalar(-0.2));
}

/// Restricts the distribution to categories 1..cutoff and renormalizes.
template <typename Scalar>
LossDistributionT<Scalar> truncate(const LossDistributionT<Scalar>& d, Eigen::Index cutoff) {
  if (cutoff < 1 || cutoff > d.support_max())
    fail(errc::invalid_cutoff, "cutoff " + std::to_string(cutoff) + " outside 1.." +
                                   std::to_string(d.support_max()));
  typename LossDistributionT<Scalar>::Vector head = d.masses.head(cutoff);
  const Scalar total = head.sum();
  if (!(total > Scalar(0)))
    fail(errc::zero_mass_below_cutoff, "no probability mass at or below category " +
                                           std::to_string(cutoff));
  head /= total;
  return LossDistributionT<Scalar>{std::move(head), d.bandwidth, d.kind, d.observation_count};
}

template <typename Scalar>
Scalar mean(const LossDistributionT<Scalar>& d) {
  Scalar acc = 0;
  for (Eigen::Index k = 1; k <= d.support_max(); ++k) acc += static_cast<Scalar>(k) * d.mass(k);
  return acc;
}

template <typename Scalar>
Scalar moment(const LossDistributionT<Scalar>& d, int order) {
  if (order < 1) fail(errc::invalid_argument, "moment order must be >= 1");
  Scalar acc = 0;
  for (Eigen::Index k = 1; k <= d.support_max(); ++k)
    acc += std::pow(static_cast<Scalar>(k), static_cast<Scalar>(order)) * d.mass(k);
  return acc;
}

template <typename Scalar>
Scalar variance(const LossDistributionT<Scalar>& d) {
  const Scalar m = mean(d);
  return std::max(Scalar(0), moment(d, 2) - m * m);
}

/// CDF evaluated at an integer category in 1..support_max.
template <typename Scalar>
Scalar cdf(const LossDistributionT<Scalar>& d, Eigen::Index category) {
  if (category < 1 || category > d.support_max())
    fail(errc::invalid_argument, "cdf argument outside 1.." + std::to_string(d.support_max()));
  return d.masses.head(category).sum();
}

/// Probability mass at an integer category in 1..support_max.
template <typename Scalar>
Scalar density(const LossDistributionT<Scalar>& d, Eigen::Index category) {
  if (category < 1 || category > d.support_max())
    fail(errc::invalid_argument, "density argument outside 1.." + std::to_string(d.support_max()));
  return d.mass(category);
}

/// Smallest category whose CDF reaches q, for q in (0, 1].
template <typename Scalar>
Eigen::Index quantile(const LossDistributionT<Scalar>& d, Scalar q) {
  if (!(q > Scalar(0)) || q > Scalar(1))
    fail(errc::invalid_argument, "quantile level must be in (0,1]");
  Scalar acc = 0;
  for (Eigen::Index k = 1; k <= d.support_max(); ++k) {
    acc += d.mass(k);
    if (acc >= q) return k;
  }
  return d.support_max();  // guards rounding at q = 1
}

/// Largest absolute mass difference between two distributions on one support.
template <typename Scalar>
Scalar sup_distance(const LossDistributionT<Scalar>& f, const LossDistributionT<Scalar>& g) {
  if (f.support_max() != g.support_max())
    fail(errc::support_mismatch, "sup distance needs a common support");
  return (f.masses - g.masses).cwiseAbs().maxCoeff();
}

struct OutlierPolicy {
  enum class Kind { none, iqr } kind{Kind::none};
  double multiplier{1.5};

  static OutlierPolicy none() { return {Kind::none, 0.0}; }
  static OutlierPolicy iqr(double multiplier = 1.5) { return {Kind::iqr, multiplier}; }
};

struct OutlierResult {
  Observations cleaned;
  bool all_dropped_fallback{false};  // the filter would have emptied the sample
};

/// Drops ratings outside [Q1 - c*IQR, Q3 + c*IQR]. Never returns an empty
/// sample: if everything would be dropped the input is kept and flagged.
inline OutlierResult remove_outliers(const Observations& obs, const OutlierPolicy& policy) {
  if (obs.values.empty()) fail(errc::invalid_argument, "outlier filter on empty sample");
  if (policy.kind == OutlierPolicy::Kind::none || obs.values.size() == 1) return {obs, false};
  std::vector<double> values(obs.values.begin(), obs.values.end());
  std::sort(values.begin(), values.end());
  const double q1 = sample_quantile<double>(values, 0.25);
  const double q3 = sample_quantile<double>(values, 0.75);
  const double span = (q3 - q1) * policy.multiplier;
  const double lo = q1 - span;
  const double hi = q3 + span;
  Observations cleaned{{}, obs.defense, obs.attack, obs.goal};
  for (int v : obs.values)
    if (v >= lo && v <= hi) cleaned.values.push_back(v);
  if (cleaned.values.empty()) return {obs, true};
  return {cleaned, false};
}

constexpr double kRescaleQuantileEpsilon = 0.027;

template <typename Scalar = double>
struct RescaledSamples {
  std::vector<std::vector<Scalar>> samples;
  std::vector<Scalar> factors;
};

/// Multiplies each continuous sample by target_max over its own
/// (1-eps)-quantile so that all truncated loss ranges line up.
template <typename Scalar = double>
RescaledSamples<Scalar> rescale_to_common_range(const std::vector<std::vector<Scalar>>& samples,
                                                Scalar target_max) {
  if (!(target_max > Scalar(0))) fail(errc::invalid_argument, "target_max must be positive");
  RescaledSamples<Scalar> out;
  for (const auto& sample : samples) {
    if (sample.empty()) fail(errc::degenerate_range, "empty sample cannot be rescaled");
    std::vector<Scalar> sorted = sorted_copy(std::span<const Scalar>(sample));
    const Scalar q = sample_quantile<Scalar>(sorted, 1.0 - kRescaleQuantileEpsilon);
    if (!(q > Scalar(0)))
      fail(errc::degenerate_range, "nonpositive high quantile; loss range is degenerate");
    const Scalar factor = target_max / q;
    std::vector<Scalar> scaled(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) scaled[i] = sample[i] * factor;
    out.samples.push_back(std::move(scaled));
    out.factors.push_back(factor);
  }
  return out;
}

/// Bins a continuous sample onto categories 1..support_max over [lo, hi]
/// (values outside are clamped) so it can be used like categorical data.
template <typename Scalar = double>
Observations discretize_sample(std::span<const Scalar> values, Eigen::Index support_max,
                               Scalar lo, Scalar hi) {
  if (values.empty()) fail(errc::empty_observations, "no values to discretize");
  if (!(hi > lo)) fail(errc::degenerate_range, "discretization range must have hi > lo");
  if (support_max < 1) fail(errc::invalid_argument, "support_max must be >= 1");
  Observations obs;
  const Scalar width = (hi - lo) / static_cast<Scalar>(support_max);
  for (Scalar v : values) {
    auto cat = static_cast<Eigen::Index>(std::ceil(static_cast<double>((v - lo) / width)));
    cat = std::clamp<Eigen::Index>(cat, 1, support_max);
    obs.values.push_back(static_cast<int>(cat));
  }
  return obs;
}

}  // namespace riskgame
