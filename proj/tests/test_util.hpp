#pragma once

// Shared generators for randomized tests. Every generator takes an explicit
// Rng so each suite pins its own seeds.

#include <vector>

#include "market.hpp"
#include "ranking.hpp"
#include "rng.hpp"

namespace mltest {

using musiclab::Market;
using musiclab::MarketState;
using musiclab::Ranking;
using musiclab::Rng;

inline std::vector<double> random_vector(Rng& rng, int n, double lo, double hi) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = rng.uniform(lo, hi);
  return out;
}

// Positive attractions in [0.05, 2); set a random entry to zero when
// allow_zero_attraction (keeps at least one positive).
struct Instance {
  std::vector<double> a;
  std::vector<double> q;
  std::vector<double> v;
};

inline Instance random_instance(Rng& rng, int n, bool allow_zero_attraction = false) {
  Instance inst;
  inst.a = random_vector(rng, n, 0.05, 2.0);
  inst.q = random_vector(rng, n, 0.0, 1.0);
  inst.v = random_vector(rng, n, 0.1, 2.0);
  if (allow_zero_attraction && n >= 2)
    inst.a[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)))] = 0.0;
  return inst;
}

inline Ranking shuffled_ranking(Rng& rng, int n) {
  std::vector<int> song_at(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) song_at[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(song_at[static_cast<std::size_t>(i)], song_at[j]);
  }
  return Ranking::from_song_at(std::move(song_at));
}

inline Market random_market(Rng& rng, int n) {
  return Market::create(random_vector(rng, n, 0.05, 1.0), random_vector(rng, n, 0.0, 1.0),
                        random_vector(rng, n, 0.1, 2.0), rng.uniform(0.2, 3.0));
}

inline MarketState random_state(Rng& rng, int n, std::int64_t max_downloads = 20) {
  MarketState state = MarketState::zeros(n);
  for (int i = 0; i < n; ++i) {
    const auto d = static_cast<std::int64_t>(
        rng.below(static_cast<std::uint64_t>(max_downloads) + 1));
    const auto extra = static_cast<std::int64_t>(rng.below(10));
    state.downloads[static_cast<std::size_t>(i)] = d;
    state.samples[static_cast<std::size_t>(i)] = d + extra;
    state.step += d + extra;
  }
  return state;
}

}  // namespace mltest
