#pragma once

// Independent reference implementations used only by the test suites. These
// deliberately avoid the library's code paths (and Eigen where practical) so
// a shared bug cannot hide: plain loops, long double accumulation, and a
// self-contained simplex solver.

#include <cstdint>
#include <string>
#include <vector>

namespace oracles {

// Numeric integration of (1/h) * integral_{n-1/2}^{n+1/2} phi(t/h) dt with
// composite Gauss-Legendre quadrature; absolute error well below 1e-12.
double kernel_weight_by_quadrature(double h, int offset);

// Direct convolution of masses (categories 1..a) with the discretized
// Gaussian kernel, restricted to 1..a and renormalized.
std::vector<double> smooth_by_direct_convolution(const std::vector<double>& masses, double h,
                                                 int window_radius);

// Upper binomial tail P(Bin(total, p) >= count) via the multiplicative pmf
// recurrence in long double.
double binomial_upper_tail(std::int64_t count, std::int64_t total, long double p);

// Exhaustive minimum hitting set size over all subsets (n <= 20).
int exhaustive_min_hitting_set_size(const std::vector<std::uint32_t>& candidate_sets, int n);

// All simple source->target paths by an iterative DFS, returned as node
// sequences sorted lexicographically.
std::vector<std::vector<std::string>> enumerate_paths_exhaustive(
    const std::vector<std::pair<std::string, std::string>>& edges, const std::string& source,
    const std::string& target);

// Single-source shortest hop counts over undirected edges (Bellman-Ford
// relaxation, unlike the library's BFS). Unreachable nodes get -1.
std::vector<int> shortest_distances(int node_count,
                                    const std::vector<std::pair<int, int>>& edges, int source);

// Zero-sum matrix game solved as a linear program (defender minimizes the
// expected loss A[i][j]). Returns the game value and one optimal mixed
// strategy per player.
struct ZeroSumSolution {
  double value{0};
  std::vector<double> defense;
  std::vector<double> attack;
};
ZeroSumSolution solve_zero_sum(const std::vector<std::vector<double>>& loss);

// Smallest L-infinity distance from `mix` to the defender-optimal polytope
// {x in simplex : (x^T A)_j <= value + slack for all j}; and the analogue for
// the attacker ({y : (A y)_i >= value - slack}).
double defender_distance_to_optimal(const std::vector<std::vector<double>>& loss, double value,
                                    const std::vector<double>& mix, double slack = 1e-7);
double attacker_distance_to_optimal(const std::vector<std::vector<double>>& loss, double value,
                                    const std::vector<double>& mix, double slack = 1e-7);

// Fictitious play for the sequential APT stage fixed point, reimplemented
// with plain std::vector arithmetic: tail-lexicographic best responses on
// running sums, lowest-index tie break, cutoff at full support.
struct AptOracleResult {
  std::vector<std::vector<double>> stage_payoffs;  // converged I(n) per stage
  std::vector<double> residuals;
};
AptOracleResult solve_sequential_apt_reference(const std::vector<std::pair<double, double>>& pq,
                                               const std::vector<double>& initial,
                                               int fp_iterations, double tol, int max_rounds);

}  // namespace oracles
