#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "riskgame/errors.hpp"

namespace riskgame {

/// Linear-interpolation sample quantile (the common "type 7" rule).
/// `sorted` must be ascending and non-empty.
template <typename Scalar>
Scalar sample_quantile(std::span<const Scalar> sorted, double p) {
  if (sorted.empty()) fail(errc::invalid_argument, "quantile of empty sample");
  if (p < 0.0 || p > 1.0) fail(errc::invalid_argument, "quantile level outside [0,1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const Scalar frac = static_cast<Scalar>(h - static_cast<double>(lo));
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

template <typename Scalar>
Scalar sample_quantile(const std::vector<Scalar>& sorted, double p) {
  return sample_quantile(std::span<const Scalar>(sorted), p);
}

/// Unbiased (n-1) sample standard deviation.
template <typename Scalar>
Scalar sample_sd(std::span<const Scalar> values) {
  if (values.size() < 2) fail(errc::invalid_argument, "sd needs at least two values");
  Scalar mean = 0;
  for (Scalar v : values) mean += v;
  mean /= static_cast<Scalar>(values.size());
  Scalar ss = 0;
  for (Scalar v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<Scalar>(values.size() - 1));
}

template <typename Scalar>
Scalar sample_sd(const std::vector<Scalar>& values) {
  return sample_sd(std::span<const Scalar>(values));
}

template <typename Scalar>
std::vector<Scalar> sorted_copy(std::span<const Scalar> values) {
  std::vector<Scalar> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Scalar>
Scalar sample_iqr(std::span<const Scalar> sorted) {
  return sample_quantile(sorted, 0.75) - sample_quantile(sorted, 0.25);
}

}  // namespace riskgame
