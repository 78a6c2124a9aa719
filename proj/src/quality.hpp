#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "market.hpp"
#include "rng.hpp"

namespace musiclab {

// Trial-and-learn quality estimate. The initial phase runs m Bernoulli
// trials per song; afterwards the running estimate merges download and
// sampling counters:  q_hat = (q0*m + D) / (m + S). The initial successes
// are kept as integers so the update stays exact.
struct QualityEstimate {
  std::vector<std::int64_t> initial_successes;
  std::int64_t m = 0;

  int size() const { return static_cast<int>(initial_successes.size()); }
  std::vector<double> q0() const;

  static QualityEstimate from_successes(std::vector<std::int64_t> successes, std::int64_t m);
};

// m Bernoulli(q_i) trials per song, in song order; consumes n*m draws.
QualityEstimate initial_estimate(std::span<const double> q_true, std::int64_t m, Rng& rng);

std::vector<double> update_estimate(const QualityEstimate& est, const MarketState& state);
void update_estimate_into(const QualityEstimate& est, const MarketState& state,
                          std::vector<double>& out);

// Mean squared error over a song subset.
double estimation_error(std::span<const double> q_est, std::span<const double> q_true,
                        std::span<const int> subset);

}  // namespace musiclab
