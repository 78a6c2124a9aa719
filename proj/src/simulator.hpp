#pragma once

#include <cstdint>
#include <vector>

#include "market.hpp"
#include "policies.hpp"
#include "ranking.hpp"

namespace musiclab {

struct SimulationConfig {
  std::int64_t iterations = 20000;    // N, one song sampling per iteration
  std::int64_t refresh_rate = 1;      // r, iterations between playlist recomputations
  int worlds = 400;                   // W
  std::uint64_t master_seed = 0;      // world w draws from stream (master_seed, w)
  std::int64_t snapshot_stride = 100; // trace snapshot every this many iterations
  std::int64_t estimate_samples = 10; // m, initial Bernoulli trials per song
  PolicySpec policy;
  int threads = 1;                    // 0 = hardware concurrency

  void validate() const;
};

struct TraceSnapshot {
  std::int64_t step = 0;
  std::int64_t total_downloads = 0;
  std::int64_t total_samples = 0;
  std::vector<std::int64_t> downloads;
  std::vector<std::int64_t> samples;
  std::vector<double> quality_estimate;
  Ranking ranking;  // ranking in force at this step
  std::uint64_t ranking_hash = 0;
};

struct WorldTrace {
  int world_id = 0;
  std::vector<TraceSnapshot> snapshots;
  MarketState final_state;
};

// One world of the market: N participants arrive one by one; every
// refresh_rate iterations the policy recomputes the playlist. Fully
// determined by (market, config, world_id).
WorldTrace run_world(const Market& market, const SimulationConfig& config, int world_id);

// W independent worlds on disjoint rng streams; results do not depend on the
// thread count or schedule.
std::vector<WorldTrace> run_experiment(const Market& market, const SimulationConfig& config);

}  // namespace musiclab
