#pragma once

#include <span>
#include <vector>

#include "market.hpp"
#include "ranking.hpp"

namespace musiclab {

// Per-song attraction a_i = alpha*A_i + f(D_i) (social influence) or
// a_i = alpha*A_i (independent condition, downloads hidden).
struct AttractionVector {
  std::vector<double> a;

  int size() const { return static_cast<int>(a.size()); }
  void validate() const;
};

AttractionVector attraction(const Market& market, const MarketState& state, Condition condition);

// In-place form for hot loops; out is resized to market.size().
void attraction_into(const Market& market, const MarketState& state, Condition condition,
                     std::vector<double>& out);

// Fills w[i] = v_{sigma_i} * a_i and returns the total. Shared by the
// probability computation and the simulator's sampling step.
double fill_sampling_weights(std::span<const double> visibility, std::span<const double> a,
                             const Ranking& ranking, std::vector<double>& w);

// p_i = v_{sigma_i} a_i / sum_j v_{sigma_j} a_j
std::vector<double> sampling_probabilities(const Market& market, const AttractionVector& a,
                                           const Ranking& ranking);

// Expected downloads of the next participant: the visibility/attraction
// weighted average of the qualities.
double expected_downloads(const Market& market, const AttractionVector& a, const Ranking& ranking);

// Same ratio for an arbitrary quality vector (used with estimated qualities).
double weighted_quality_ratio(std::span<const double> visibility, std::span<const double> a,
                              std::span<const double> quality, const Ranking& ranking);

// Expected downloads at t+1 conditional on t, with ranking sigma in force at
// t and sigma_next at t+1. Identity influence transform only: the downloaded
// branch for song j replaces a_j by a_j + 1.
double one_step_expected_downloads(const Market& market, const AttractionVector& a,
                                   const Ranking& sigma, const Ranking& sigma_next);

// Raw-permutation form for exhaustive searches over sigma_next.
double one_step_expected_downloads(const Market& market, const AttractionVector& a,
                                   std::span<const int> sigma_position_of,
                                   std::span<const int> sigma_next_position_of);

}  // namespace musiclab
