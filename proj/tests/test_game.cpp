#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "riskgame/game.hpp"

using namespace riskgame;

namespace {

LossDistribution from(std::initializer_list<double> masses) {
  LossDistribution d;
  d.masses.resize(static_cast<Eigen::Index>(masses.size()));
  Eigen::Index i = 0;
  for (double m : masses) d.masses[i++] = m;
  return d;
}

// 0/1-valued classical game embedded as two-category point masses: a loss of
// b in {0,1} becomes the point mass at category b+1.
Game binary_game(const std::vector<std::vector<int>>& wins) {
  const auto n = static_cast<Eigen::Index>(wins.size());
  const auto m = static_cast<Eigen::Index>(wins[0].size());
  std::vector<LossDistribution> payoffs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) payoffs.push_back(point_mass(wins[i][j] + 1, 2));
  return assemble_game<double>(n, m, 1, std::move(payoffs));
}

Eigen::VectorXd uniform_mix(Eigen::Index size) {
  return Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
}

}  // namespace

TEST_CASE("assemble_game validates the payoff grid") {
  SUBCASE("a 2x2x1 grid with a shared support is accepted") {
    const Game g = assemble_game<double>(
        2, 2, 1, {point_mass(1, 4), point_mass(2, 4), point_mass(3, 4), point_mass(4, 4)});
    CHECK(g.defenses == 2);
    CHECK(g.defense_labels == std::vector<std::string>{"d1", "d2"});
    CHECK(g.attack_labels == std::vector<std::string>{"a1", "a2"});
    CHECK(g.goal_labels == std::vector<std::string>{"g1"});
    CHECK(g.goal_weights[0] == 1.0);
  }
  SUBCASE("the 1x1x1 game is a valid degenerate case") {
    CHECK_NOTHROW(assemble_game<double>(1, 1, 1, {point_mass(1, 2)}));
  }
  SUBCASE("mixed supports are rejected with an error") {
    CHECK_THROWS_AS(assemble_game<double>(2, 1, 1, {point_mass(1, 6), point_mass(1, 10)}), error);
    try {
      assemble_game<double>(2, 1, 1, {point_mass(1, 6), point_mass(1, 10)});
    } catch (const error& e) {
      CHECK(e.code() == errc::support_mismatch);
    }
  }
  SUBCASE("an incomplete grid is rejected") {
    try {
      assemble_game<double>(2, 2, 1, {point_mass(1, 4), point_mass(2, 4), point_mass(3, 4)});
      CHECK(false);
    } catch (const error& e) {
      CHECK(e.code() == errc::incomplete_grid);
    }
  }
  SUBCASE("goal weights normalize") {
    const std::vector<double> w{1.0, 3.0};
    const Game g = assemble_game<double>(
        1, 1, 2, {point_mass(1, 2), point_mass(2, 2)}, {}, {}, {}, std::span<const double>(w));
    CHECK(g.goal_weights[0] == doctest::Approx(0.25));
    CHECK(g.goal_weights[1] == doctest::Approx(0.75));
  }
}

TEST_CASE("scalarize mixes goals by weight") {
  SUBCASE("single-goal games pass through unchanged") {
    const Game g = assemble_game<double>(1, 1, 1, {from({0.5, 0.5})});
    const Game s = scalarize(g);
    CHECK(s.goals == 1);
    CHECK(sup_distance(s.payoff(0, 0), g.payoff(0, 0)) == 0.0);
  }
  SUBCASE("equal weights average point masses") {
    const std::vector<double> w{0.5, 0.5};
    const Game g = assemble_game<double>(1, 1, 2, {point_mass(2, 5), point_mass(4, 5)}, {}, {},
                                         {}, std::span<const double>(w));
    const Game s = scalarize(g);
    CHECK(s.payoff(0, 0).masses[1] == doctest::Approx(0.5));
    CHECK(s.payoff(0, 0).masses[3] == doctest::Approx(0.5));
  }
  SUBCASE("weights (1,2) and (1/3,2/3) agree") {
    const std::vector<double> w1{1.0, 2.0};
    const std::vector<double> w2{1.0 / 3.0, 2.0 / 3.0};
    const Game a = assemble_game<double>(1, 1, 2, {point_mass(1, 3), point_mass(3, 3)}, {}, {},
                                         {}, std::span<const double>(w1));
    const Game b = assemble_game<double>(1, 1, 2, {point_mass(1, 3), point_mass(3, 3)}, {}, {},
                                         {}, std::span<const double>(w2));
    CHECK(sup_distance(scalarize(a).payoff(0, 0), scalarize(b).payoff(0, 0)) <= 1e-15);
  }
}

TEST_CASE("mixture payoff") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto random_dist = [&](Eigen::Index support) {
    LossDistribution d;
    d.masses.resize(support);
    for (Eigen::Index k = 0; k < support; ++k) d.masses[k] = u(rng);
    d.masses /= d.masses.sum();
    return d;
  };
  std::vector<LossDistribution> payoffs;
  for (int k = 0; k < 4; ++k) payoffs.push_back(random_dist(6));
  const Game g = assemble_game<double>(2, 2, 1, payoffs);

  SUBCASE("pure strategies select the exact cell") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
    x[1] = 1.0;
    y[0] = 1.0;
    CHECK(sup_distance(mixture_payoff(g, x, y), g.payoff(1, 0)) <= 1e-15);
  }
  SUBCASE("uniform mixes average the four cells") {
    const LossDistribution m = mixture_payoff(g, uniform_mix(2), uniform_mix(2));
    const Eigen::VectorXd expected =
        0.25 * (payoffs[0].masses + payoffs[1].masses + payoffs[2].masses + payoffs[3].masses);
    CHECK((m.masses - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("random mixes match the brute-force double sum") {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(2), y(2);
      x << u(rng), u(rng);
      y << u(rng), u(rng);
      x /= x.sum();
      y /= y.sum();
      Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) expected += x[i] * y[j] * g.payoff(i, j).masses;
      CHECK((mixture_payoff(g, x, y).masses - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(mixture_payoff(g, uniform_mix(3), uniform_mix(2)), error);
    CHECK_THROWS_AS(mixture_payoff(g, uniform_mix(2), uniform_mix(5)), error);
  }
}

TEST_CASE("fictitious play solves the matching pennies embedding") {
  const Game g = assemble_game<double>(
      2, 2, 1, {point_mass(2, 2), point_mass(1, 2), point_mass(1, 2), point_mass(2, 2)});
  const Equilibrium eq = fictitious_play(g, 2000);
  CHECK(eq.optimal_defense[0] == doctest::Approx(0.5).epsilon(0.1));
  CHECK(eq.optimal_defense.sum() == doctest::Approx(1.0));
  CHECK(eq.optimal_attack[0] == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(eq.optimal_defense[0] - 0.5) <= 0.05);
  CHECK(std::abs(eq.optimal_attack[0] - 0.5) <= 0.05);
}

TEST_CASE("fictitious play finds strictly dominant rows exactly") {
  // row 1 loses category 1 against every column, row 2 loses category 2
  const Game g = assemble_game<double>(
      2, 3, 1, {point_mass(1, 3), point_mass(1, 3), point_mass(1, 3), point_mass(2, 3),
                point_mass(2, 3), point_mass(2, 3)});
  const Equilibrium eq = fictitious_play(g, 500);
  CHECK(eq.optimal_defense[0] == 1.0);
  CHECK(eq.optimal_defense[1] == 0.0);
  CHECK(eq.optimal_attack[0] == 1.0);  // columns tie, lowest index wins
}

TEST_CASE("1xm games concentrate on the most severe threat") {
  const Game g = assemble_game<double>(
      1, 3, 1, {point_mass(1, 3), point_mass(3, 3), point_mass(2, 3)});
  const Equilibrium fp = fictitious_play(g, 500);
  CHECK(fp.optimal_attack[1] == 1.0);
  const Equilibrium direct = solve_degenerate(g);
  CHECK(direct.optimal_attack[1] == 1.0);
  CHECK(direct.optimal_defense[0] == 1.0);
  CHECK(mean(direct.assurances[0]) == doctest::Approx(3.0));
}

TEST_CASE("nx1 games pick the least damaging defense") {
  const Game g = assemble_game<double>(
      3, 1, 1, {point_mass(3, 3), point_mass(1, 3), point_mass(2, 3)});
  const Equilibrium direct = solve_degenerate(g);
  CHECK(direct.optimal_defense[1] == 1.0);
  const Equilibrium fp = fictitious_play(g, 500);
  CHECK(fp.optimal_defense[1] >= 0.95);
}

TEST_CASE("fictitious play is deterministic") {
  std::mt19937_64 rng(67);
  std::uniform_int_distribution<int> cat(1, 5);
  std::vector<LossDistribution> payoffs;
  for (int k = 0; k < 6; ++k)
    payoffs.push_back(smooth(build_empirical(
        Observations{{cat(rng), cat(rng), cat(rng)}, "", "", ""}, 5), 0.8));
  const Game g = assemble_game<double>(2, 3, 1, payoffs);
  const Equilibrium a = fictitious_play(g, 700, 4);
  const Equilibrium b = fictitious_play(g, 700, 4);
  CHECK((a.optimal_defense - b.optimal_defense).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.optimal_attack - b.optimal_attack).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sup_distance(a.assurances[0], b.assurances[0]) == 0.0);
}

TEST_CASE("single-goal fictitious play ignores goal weight rescaling") {
  const std::vector<double> w1{0.4};
  const std::vector<double> w2{7.0};
  const Game a = assemble_game<double>(
      2, 2, 1, {from({0.2, 0.8}), from({0.7, 0.3}), from({0.5, 0.5}), from({0.1, 0.9})}, {}, {},
      {}, std::span<const double>(w1));
  const Game b = assemble_game<double>(
      2, 2, 1, {from({0.2, 0.8}), from({0.7, 0.3}), from({0.5, 0.5}), from({0.1, 0.9})}, {}, {},
      {}, std::span<const double>(w2));
  const Equilibrium ea = fictitious_play(a, 400);
  const Equilibrium eb = fictitious_play(b, 400);
  CHECK((ea.optimal_defense - eb.optimal_defense).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("masses above the cutoff never influence the result") {
  // two games identical below category 4, scrambled above it
  auto make = [](double tail_a, double tail_b) {
    LossDistribution base = from({0.25, 0.2, 0.15, 0.1, tail_a, tail_b});
    base.masses /= base.masses.sum();
    return base;
  };
  std::vector<LossDistribution> p1, p2;
  for (int k = 0; k < 4; ++k) {
    const double lo = 0.05 + 0.03 * k;
    p1.push_back(make(lo, 0.25 - lo));
    p2.push_back(make(0.25 - lo, lo));
  }
  // masses at categories 1..4 agree cell by cell; only 5..6 differ
  const Game g1 = assemble_game<double>(2, 2, 1, p1);
  const Game g2 = assemble_game<double>(2, 2, 1, p2);
  const Equilibrium e1 = fictitious_play(g1, 600, 4);
  const Equilibrium e2 = fictitious_play(g2, 600, 4);
  CHECK((e1.optimal_defense - e2.optimal_defense).cwiseAbs().maxCoeff() == 0.0);
  CHECK((e1.optimal_attack - e2.optimal_attack).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sup_distance(e1.assurances[0], e2.assurances[0]) <= 1e-12);
}

TEST_CASE("fictitious play validates the cutoff") {
  const Game g = binary_game({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(fictitious_play(g, 100, 5), error);
  CHECK_THROWS_AS(fictitious_play(g, 100, 0), error);
  CHECK_THROWS_AS(fictitious_play(g, 0), error);
}

TEST_CASE("equilibrium outputs are valid") {
  const Game g = binary_game({{0, 1, 1}, {1, 0, 0}});
  const Equilibrium eq = fictitious_play(g, 1500, 2);
  CHECK(eq.optimal_defense.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(eq.optimal_attack.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(eq.optimal_defense.minCoeff() >= 0.0);
  CHECK(eq.optimal_attack.minCoeff() >= 0.0);
  REQUIRE(eq.assurances.size() == 1);
  CHECK(eq.assurances[0].support_max() == 2);
  CHECK_NOTHROW(validate(eq.assurances[0]));
  CHECK(eq.cutoff == 2);
  CHECK(eq.iterations == 1500);
}

TEST_CASE("fictitious play agrees with the LP oracle on binary games") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<int>> wins(n, std::vector<int>(m));
    std::vector<std::vector<double>> loss(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        wins[i][j] = static_cast<int>(rng() % 2);
        loss[i][j] = wins[i][j];
      }
    const oracles::ZeroSumSolution lp = oracles::solve_zero_sum(loss);
    const Equilibrium eq = fictitious_play(binary_game(wins), 5000);
    const std::vector<double> defense(eq.optimal_defense.data(),
                                      eq.optimal_defense.data() + n);
    const std::vector<double> attack(eq.optimal_attack.data(), eq.optimal_attack.data() + m);
    CHECK(oracles::defender_distance_to_optimal(loss, lp.value, defense) <= 0.05);
    CHECK(oracles::attacker_distance_to_optimal(loss, lp.value, attack) <= 0.05);
    CHECK(mean(eq.assurances[0]) == doctest::Approx(lp.value + 1.0).epsilon(0.08));
  }
}

TEST_CASE("degenerate solver matches fictitious play frequencies") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<LossDistribution> payoffs;
    std::vector<int> cats;
    for (int j = 0; j < 4; ++j) {
      int c = 1 + static_cast<int>(rng() % 6);
      while (std::find(cats.begin(), cats.end(), c) != cats.end())
        c = 1 + static_cast<int>(rng() % 6);
      cats.push_back(c);
      payoffs.push_back(point_mass(c, 6));
    }
    const Game g = assemble_game<double>(1, 4, 1, payoffs);
    const Equilibrium direct = solve_degenerate(g);
    const Equilibrium fp = fictitious_play(g, 500);
    Eigen::Index direct_best = 0;
    direct.optimal_attack.maxCoeff(&direct_best);
    CHECK(fp.optimal_attack[direct_best] >= 0.95);
  }
}

TEST_CASE("solve_degenerate rejects non-degenerate games") {
  CHECK_THROWS_AS(solve_degenerate(binary_game({{0, 1}, {1, 0}})), error);
}

TEST_CASE("the cutoff can flip a pure equilibrium into a mixed one") {
  // Payoffs on 1..10. At the full support the first row dominates in the tail
  // ordering: both its cells carry clearly less top-category mass. After
  // truncation at 6 the renormalized masses at category 6 form a cyclic
  // (matching-pennies-like) pattern, so no pure saddle survives.
  auto cell = [](double at6, double at10) {
    Eigen::VectorXd m(10);
    // most mass low, a controlled bump at 6 and a controlled tail at 10
    m << 0.30, 0.20, 0.12, 0.08, 0.05, at6, 0.01, 0.005, 0.005, at10;
    LossDistribution d;
    d.masses = m / m.sum();
    return d;
  };
  // tail mass at 10: row 1 low, row 2 high -> row 1 pure at cutoff 10
  // bump at 6: (0.10, 0.02 / 0.03, 0.09) -> cyclic after truncation
  const Game g = assemble_game<double>(2, 2, 1, {cell(0.10, 0.001), cell(0.02, 0.002),
                                                 cell(0.03, 0.05), cell(0.09, 0.06)});
  const Equilibrium full = fictitious_play(g, 1000, 10);
  CHECK(full.optimal_defense[0] >= 0.999);

  const Equilibrium reduced = fictitious_play(g, 1000, 6);
  CHECK(reduced.optimal_defense[0] >= 0.05);
  CHECK(reduced.optimal_defense[1] >= 0.05);
  CHECK(reduced.optimal_attack[0] >= 0.05);
  CHECK(reduced.optimal_attack[1] >= 0.05);
}
