#include "simulator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "errors.hpp"
#include "model.hpp"
#include "quality.hpp"
#include "rng.hpp"

namespace musiclab {

void SimulationConfig::validate() const {
  require(iterations >= 1, errc::invalid_argument, "iterations must be >= 1");
  require(refresh_rate >= 1, errc::invalid_argument, "refresh rate must be >= 1");
  require(refresh_rate <= iterations, errc::invalid_argument,
          "refresh rate cannot exceed the iteration count");
  require(worlds >= 1, errc::invalid_argument, "worlds must be >= 1");
  require(snapshot_stride >= 1, errc::invalid_argument, "snapshot stride must be >= 1");
  require(estimate_samples >= 1, errc::invalid_argument, "estimate sample size must be >= 1");
  require(threads >= 0, errc::invalid_argument, "threads must be >= 0");
}

namespace {

TraceSnapshot make_snapshot(std::int64_t step, const MarketState& state,
                            std::vector<double> q_est, const Ranking& ranking) {
  TraceSnapshot snap;
  snap.step = step;
  snap.downloads = state.downloads;
  snap.samples = state.samples;
  for (std::int64_t d : state.downloads) snap.total_downloads += d;
  for (std::int64_t s : state.samples) snap.total_samples += s;
  snap.quality_estimate = std::move(q_est);
  snap.ranking = ranking;
  snap.ranking_hash = ranking.hash();
  return snap;
}

// One draw; zero-weight songs are never selected.
int sample_song(const std::vector<double>& weights, double total, Rng& rng) {
  const double target = rng.next_double() * total;
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = static_cast<int>(i);
    if (target < cumulative) return last_positive;
  }
  return last_positive;  // roundoff spill lands on the last positive weight
}

}  // namespace

WorldTrace run_world(const Market& market, const SimulationConfig& config, int world_id) {
  market.validate();
  config.validate();
  require(world_id >= 0, errc::invalid_argument, "world id must be >= 0");

  const int n = market.size();
  Rng rng(config.master_seed, static_cast<std::uint64_t>(world_id));

  // Pre-sampling phase; estimates are tracked for every policy.
  const QualityEstimate estimate = initial_estimate(market.quality, config.estimate_samples, rng);
  MarketState state = MarketState::zeros(n);
  std::vector<double> q_est = estimate.q0();

  PolicyEngine policy(config.policy);
  Ranking ranking = policy.apply(market, state, q_est, rng);  // refresh at k = 0

  WorldTrace trace;
  trace.world_id = world_id;
  trace.snapshots.reserve(
      static_cast<std::size_t>(config.iterations / config.snapshot_stride) + 2);
  trace.snapshots.push_back(make_snapshot(0, state, q_est, ranking));

  std::vector<double> weights(static_cast<std::size_t>(n));
  std::vector<double> attraction_buf(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < config.iterations; ++k) {
    if (k > 0 && k % config.refresh_rate == 0) {
      update_estimate_into(estimate, state, q_est);
      ranking = policy.apply(market, state, q_est, rng);
    }
    attraction_into(market, state, config.policy.condition, attraction_buf);
    const double total = fill_sampling_weights(market.visibility, attraction_buf, ranking, weights);
    const int song = sample_song(weights, total, rng);
    const auto ssong = static_cast<std::size_t>(song);
    ++state.samples[ssong];
    if (rng.bernoulli(market.quality[ssong])) ++state.downloads[ssong];
    state.step = k + 1;

    if ((k + 1) % config.snapshot_stride == 0 || k + 1 == config.iterations)
      trace.snapshots.push_back(
          make_snapshot(k + 1, state, update_estimate(estimate, state), ranking));
  }

  trace.final_state = std::move(state);
  return trace;
}

std::vector<WorldTrace> run_experiment(const Market& market, const SimulationConfig& config) {
  market.validate();
  config.validate();

  unsigned thread_count = config.threads > 0
                              ? static_cast<unsigned>(config.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(config.worlds));

  std::vector<WorldTrace> traces(static_cast<std::size_t>(config.worlds));
  if (thread_count <= 1) {
    for (int w = 0; w < config.worlds; ++w)
      traces[static_cast<std::size_t>(w)] = run_world(market, config, w);
    return traces;
  }

  std::atomic<int> next_world{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const int w = next_world.fetch_add(1);
      if (w >= config.worlds || failed.load()) return;
      try {
        traces[static_cast<std::size_t>(w)] = run_world(market, config, w);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return traces;
}

}  // namespace musiclab
