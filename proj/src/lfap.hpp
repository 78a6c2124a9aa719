#pragma once

#include <functional>
#include <span>
#include <vector>

#include "market.hpp"
#include "model.hpp"
#include "ranking.hpp"

namespace musiclab::lfap {

// |f(lambda)| below this counts as a root; also the minimal lambda progress
// per Dinkelbach step before the iteration is declared converged.
inline constexpr double kConvergenceTol = 1e-12;

// Linear Fractional Assignment Problem: minimize sum(cost)/sum(weight) over
// perfect matchings. Weights must be strictly positive.
struct LfapInstance {
  int n = 0;
  std::vector<double> cost;    // row-major n*n
  std::vector<double> weight;  // row-major n*n, all > 0

  static LfapInstance create(int n, std::vector<double> cost, std::vector<double> weight);
  double cost_at(int i, int j) const { return cost[static_cast<std::size_t>(i) * n + j]; }
  double weight_at(int i, int j) const { return weight[static_cast<std::size_t>(i) * n + j]; }
};

struct LfapSolution {
  std::vector<int> matching;  // row -> column
  double objective = 0.0;     // ratio recomputed from the instance
  std::vector<double> lambda_trace;
};

using AssignmentSolver = std::function<std::vector<int>(int, std::span<const double>)>;

// Dinkelbach parametric iteration: each step solves one linear assignment
// with costs c - lambda*d and updates lambda to the matching's exact ratio.
// The lambda sequence is nonincreasing and finite; iteration is capped at
// n + 2 steps.
LfapSolution solve_lfap_dinkelbach(const LfapInstance& instance,
                                   const AssignmentSolver& oracle = {});

// sum_p v_p a_{pi_p} q_{pi_p} / sum_p v_p a_{pi_p} for a given ranking.
double ranking_objective(std::span<const double> a, std::span<const double> q,
                         std::span<const double> v, const Ranking& ranking);

// The playlist maximizing sum_p v_p a_{pi_p} (q_{pi_p} - lambda): songs
// sorted by a_i(q_i - lambda) descending into positions sorted by visibility
// descending, ties broken by index.
Ranking rearrangement_ranking(std::span<const double> a, std::span<const double> q,
                              std::span<const double> v, double lambda);

struct ParametricPoint {
  double value = 0.0;  // f(lambda)
  Ranking playlist;    // an attaining ranking under the canonical tie-break
};

ParametricPoint parametric_value(std::span<const double> a, std::span<const double> q,
                                 std::span<const double> v, double lambda);

struct PerformanceSolution {
  Ranking ranking;
  double objective = 0.0;
  std::vector<double> lambda_trace;  // nondecreasing
};

// Fast path: Dinkelbach root finding on f(lambda), O(n log n) per step.
// Reusable form for hot loops: the visibility (and its sorted position
// order) is fixed at construction, scratch buffers persist across solves.
class ParametricSolver {
public:
  explicit ParametricSolver(std::vector<double> visibility);

  PerformanceSolution solve(std::span<const double> a, std::span<const double> q);
  std::span<const double> visibility() const { return v_; }

private:
  void rearrange(std::span<const double> a, std::span<const double> q, double lambda);
  double playlist_ratio(std::span<const double> a, std::span<const double> q) const;

  std::vector<double> v_;
  std::vector<int> pos_order_;    // positions by visibility desc, index asc
  std::vector<double> key_;       // a_i (q_i - lambda)
  std::vector<int> song_order_;
  std::vector<int> position_of_;  // current playlist under construction
};

PerformanceSolution solve_performance_parametric(std::span<const double> a,
                                                 std::span<const double> q,
                                                 std::span<const double> v);

// General path: reduction to the LFAP with c_ij = -v_j a_i q_i and
// d_ij = v_j a_i, solved via solve_lfap_dinkelbach. The returned ranking is
// canonicalized through rearrangement_ranking at the optimal ratio so both
// paths share the tie-break contract.
Ranking performance_ranking(const Market& market, const AttractionVector& attr,
                            std::span<const double> q);

// Exhaustive argmax over all permutations; first maximum in lexicographic
// position_of order. Guarded at n <= 10.
Ranking brute_force_ranking(int n, const std::function<double(const Ranking&)>& objective);

// Convenience: brute-force argmax of the expected-download ratio.
Ranking brute_force_performance_ranking(std::span<const double> a, std::span<const double> q,
                                        std::span<const double> v);

}  // namespace musiclab::lfap
