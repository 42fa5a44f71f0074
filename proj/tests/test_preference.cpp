#include <doctest.h>

#include <random>

#include "riskgame/loss_distribution.hpp"
#include "riskgame/preference.hpp"

using namespace riskgame;

namespace {

LossDistribution from(std::initializer_list<double> masses) {
  LossDistribution d;
  d.masses.resize(static_cast<Eigen::Index>(masses.size()));
  Eigen::Index i = 0;
  for (double m : masses) d.masses[i++] = m;
  return d;
}

LossDistribution random_full_support(std::mt19937_64& rng, Eigen::Index support) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  LossDistribution d;
  d.masses.resize(support);
  for (Eigen::Index k = 0; k < support; ++k) d.masses[k] = u(rng);
  d.masses /= d.masses.sum();
  return d;
}

// shifts some mass upward so the result first-order dominates the input
LossDistribution push_mass_up(std::mt19937_64& rng, const LossDistribution& d) {
  LossDistribution out = d;
  std::uniform_int_distribution<Eigen::Index> pick(0, d.support_max() - 1);
  for (int moves = 0; moves < 3; ++moves) {
    Eigen::Index lo = pick(rng);
    Eigen::Index hi = pick(rng);
    if (lo > hi) std::swap(lo, hi);
    if (lo == hi) continue;
    const double delta = out.masses[lo] * 0.5;
    out.masses[lo] -= delta;
    out.masses[hi] += delta;
  }
  out.masses[d.support_max() - 1] += out.masses[0] * 0.5;
  out.masses[0] *= 0.5;
  out.masses /= out.masses.sum();
  return out;
}

}  // namespace

TEST_CASE("point masses order by category") {
  const auto low = point_mass(2, 5);
  const auto high = point_mass(5, 5);
  const PreferenceResult r = prefer(low, high);
  CHECK(r.verdict == 1);
  CHECK(*r.decided_at_category == 5);
  CHECK(prefer(high, low).verdict == 2);
}

TEST_CASE("identical distributions are indifferent") {
  const auto d = from({0.25, 0.25, 0.5});
  const PreferenceResult r = prefer(d, d);
  CHECK(r.verdict == 0);
  CHECK_FALSE(r.decided_at_category.has_value());
}

TEST_CASE("smaller top-category mass wins") {
  const PreferenceResult r = prefer(from({0.2, 0.8}), from({0.3, 0.7}));
  CHECK(r.verdict == 2);  // g carries less mass at the top category
  CHECK(*r.decided_at_category == 2);
}

TEST_CASE("mismatched supports and kinds are rejected") {
  CHECK_THROWS_AS(prefer(from({1.0}), from({0.5, 0.5})), error);
  LossDistribution a = from({0.5, 0.5});
  LossDistribution b = from({0.5, 0.5});
  b.kind = DistributionKind::discretized_continuous;
  CHECK_THROWS_AS(prefer(a, b), error);
}

TEST_CASE("preference is total, antisymmetric and reflexive") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto f = random_full_support(rng, 10);
    const auto g = random_full_support(rng, 10);
    const int fg = prefer(f, g).verdict;
    const int gf = prefer(g, f).verdict;
    CHECK((fg == 0 || fg == 1 || fg == 2));
    if (fg == 0) CHECK(gf == 0);
    if (fg == 1) CHECK(gf == 2);
    if (fg == 2) CHECK(gf == 1);
    CHECK(prefer(f, f).verdict == 0);
  }
}

TEST_CASE("preference is transitive on strict triples") {
  std::mt19937_64 rng(29);
  int checked = 0;
  while (checked < 1000) {
    auto a = random_full_support(rng, 10);
    auto b = random_full_support(rng, 10);
    auto c = random_full_support(rng, 10);
    if (prefer(a, b).verdict == 2) std::swap(a, b);
    if (prefer(b, c).verdict == 2) std::swap(b, c);
    if (prefer(a, b).verdict == 2) std::swap(a, b);
    if (prefer(a, b).verdict != 1 || prefer(b, c).verdict != 1) continue;
    CHECK(prefer(a, c).verdict == 1);
    ++checked;
  }
}

TEST_CASE("strict first-order dominance implies preference for the dominated side") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = random_full_support(rng, 10);
    const auto g = push_mass_up(rng, f);
    // survival check guards the generator itself
    double sf = 0.0, sg = 0.0;
    bool strict = false;
    bool dominated = true;
    for (Eigen::Index k = 10; k >= 1; --k) {
      sf += f.mass(k);
      sg += g.mass(k);
      if (sg < sf - 1e-12) dominated = false;
      if (sg > sf + 1e-9) strict = true;
    }
    if (!dominated || !strict) continue;
    CHECK(prefer(f, g).verdict == 1);
  }
}

TEST_CASE("multi-goal preference reduces to prefer for a single goal") {
  std::mt19937_64 rng(37);
  const auto f = random_full_support(rng, 6);
  const auto g = random_full_support(rng, 6);
  const std::vector<LossDistribution> fs{f}, gs{g};
  const std::vector<double> w{2.5};
  CHECK(prefer_multi(fs, gs, w).verdict == prefer(f, g).verdict);
}

TEST_CASE("multi-goal preference on identical lists is indifferent") {
  std::mt19937_64 rng(41);
  const std::vector<LossDistribution> fs{random_full_support(rng, 5),
                                         random_full_support(rng, 5)};
  const std::vector<double> w{1.0, 2.0};
  CHECK(prefer_multi(fs, fs, w).verdict == 0);
}

TEST_CASE("multi-goal preference matches a direct weighted-sum oracle") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<LossDistribution> fs{random_full_support(rng, 7),
                                           random_full_support(rng, 7)};
    const std::vector<LossDistribution> gs{random_full_support(rng, 7),
                                           random_full_support(rng, 7)};
    const std::vector<double> w{1.0, 2.0};
    // oracle: mix by hand, compare from the top category down
    Eigen::VectorXd mf = (fs[0].masses + 2.0 * fs[1].masses) / 3.0;
    Eigen::VectorXd mg = (gs[0].masses + 2.0 * gs[1].masses) / 3.0;
    int expected = 0;
    for (Eigen::Index k = 6; k >= 0; --k) {
      if (std::abs(mf[k] - mg[k]) <= 1e-9) continue;
      expected = mf[k] < mg[k] ? 1 : 2;
      break;
    }
    CHECK(prefer_multi(fs, gs, w).verdict == expected);
  }
}

TEST_CASE("multi-goal preference is invariant under weight scaling") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<LossDistribution> fs{random_full_support(rng, 6),
                                           random_full_support(rng, 6),
                                           random_full_support(rng, 6)};
    const std::vector<LossDistribution> gs{random_full_support(rng, 6),
                                           random_full_support(rng, 6),
                                           random_full_support(rng, 6)};
    const std::vector<double> w{0.2, 1.3, 0.7};
    const std::vector<double> scaled{0.2 * 17.5, 1.3 * 17.5, 0.7 * 17.5};
    CHECK(prefer_multi(fs, gs, w).verdict == prefer_multi(fs, gs, scaled).verdict);
  }
}

TEST_CASE("multi-goal preference validates weights") {
  const std::vector<LossDistribution> fs{point_mass(1, 3)};
  const std::vector<LossDistribution> gs{point_mass(2, 3)};
  CHECK_THROWS_AS(prefer_multi(fs, gs, std::vector<double>{0.0}), error);
  CHECK_THROWS_AS(prefer_multi(fs, gs, std::vector<double>{-1.0}), error);
  CHECK_THROWS_AS(prefer_multi(fs, gs, std::vector<double>{1.0, 1.0}), error);
}

TEST_CASE("sorting by preference") {
  SUBCASE("singleton") {
    const std::vector<LossDistribution> ds{point_mass(2, 4)};
    CHECK(sort_by_preference(ds) == std::vector<Eigen::Index>{0});
  }
  SUBCASE("a dominance chain keeps its order") {
    const std::vector<LossDistribution> ds{point_mass(1, 3), point_mass(2, 3), point_mass(3, 3)};
    CHECK(sort_by_preference(ds) == std::vector<Eigen::Index>{0, 1, 2});
    const std::vector<int> ranks = ranks_from_order(sort_by_preference(ds));
    CHECK(ranks == std::vector<int>{1, 2, 3});
  }
  SUBCASE("matches the exhaustive pairwise oracle on random inputs") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<LossDistribution> ds;
      for (int i = 0; i < 6; ++i)
        ds.push_back(smooth(build_empirical(
            Observations{{1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8),
                          1 + static_cast<int>(rng() % 8)}, "", "", ""}, 8), 0.6));
      // oracle: repeated selection of the minimum by pairwise comparison
      std::vector<Eigen::Index> remaining{0, 1, 2, 3, 4, 5};
      std::vector<Eigen::Index> expected;
      while (!remaining.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i)
          if (prefer(ds[remaining[i]], ds[remaining[best]]).verdict == 1) best = i;
        expected.push_back(remaining[best]);
        remaining.erase(remaining.begin() + best);
      }
      CHECK(sort_by_preference(ds) == expected);
    }
  }
  SUBCASE("stable for indifferent entries") {
    const std::vector<LossDistribution> ds{point_mass(2, 3), point_mass(2, 3), point_mass(1, 3)};
    CHECK(sort_by_preference(ds) == std::vector<Eigen::Index>{2, 0, 1});
  }
}

TEST_CASE("verdicts depend only on masses at or below the cutoff") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 200; ++trial) {
    auto f = random_full_support(rng, 10);
    auto g = random_full_support(rng, 10);
    const Eigen::Index cutoff = 4;
    const int base = prefer(truncate(f, cutoff), truncate(g, cutoff)).verdict;
    // scramble everything above the cutoff, renormalizing the tail only
    auto scramble = [&](LossDistribution d) {
      std::uniform_real_distribution<double> u(0.01, 1.0);
      const double tail = d.masses.tail(10 - cutoff).sum();
      Eigen::VectorXd fresh(10 - cutoff);
      for (Eigen::Index k = 0; k < fresh.size(); ++k) fresh[k] = u(rng);
      d.masses.tail(10 - cutoff) = fresh / fresh.sum() * tail;
      return d;
    };
    CHECK(prefer(truncate(scramble(f), cutoff), truncate(scramble(g), cutoff)).verdict == base);
  }
}
