#include "musiclab.h"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lfap.hpp"
#include "market.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "policies.hpp"
#include "quality.hpp"
#include "ranking.hpp"
#include "rng.hpp"
#include "scenarios.hpp"
#include "simulator.hpp"
#include "stats.hpp"

using namespace musiclab;

struct ml_market {
  Market market;
};

struct ml_experiment {
  std::vector<WorldTrace> traces;
  int songs = 0;
};

namespace {

thread_local std::string tls_last_error;

ml_status status_from(errc code) {
  switch (code) {
    case errc::invalid_argument: return ML_ERR_INVALID_ARGUMENT;
    case errc::dimension_mismatch: return ML_ERR_DIMENSION_MISMATCH;
    case errc::degenerate_market: return ML_ERR_DEGENERATE_MARKET;
    case errc::unsupported_transform: return ML_ERR_UNSUPPORTED_TRANSFORM;
    case errc::state_corruption: return ML_ERR_STATE_CORRUPTION;
    case errc::size_guard: return ML_ERR_SIZE_GUARD;
    case errc::no_convergence: return ML_ERR_NO_CONVERGENCE;
    case errc::data_missing: return ML_ERR_DATA;
  }
  return ML_ERR_INTERNAL;
}

template <typename Fn>
ml_status wrap(Fn&& fn) {
  try {
    fn();
    return ML_OK;
  } catch (const Error& e) {
    tls_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    tls_last_error = e.what();
    return ML_ERR_INTERNAL;
  } catch (...) {
    tls_last_error = "unknown error";
    return ML_ERR_INTERNAL;
  }
}

void check_pointer(const void* p, const char* what) {
  require(p != nullptr, errc::invalid_argument, std::string(what) + " must not be NULL");
}

Transform to_transform(ml_transform f) {
  switch (f) {
    case ML_TRANSFORM_IDENTITY: return Transform::identity;
    case ML_TRANSFORM_LOG1P: return Transform::log1p;
    case ML_TRANSFORM_SQRT: return Transform::sqrt;
  }
  fail(errc::unsupported_transform, "unknown influence transform code");
}

Condition to_condition(ml_condition c) {
  switch (c) {
    case ML_CONDITION_SOCIAL_INFLUENCE: return Condition::social_influence;
    case ML_CONDITION_INDEPENDENT: return Condition::independent;
  }
  fail(errc::invalid_argument, "unknown condition code");
}

PolicyKind to_policy(ml_policy p) {
  switch (p) {
    case ML_POLICY_DOWNLOAD_RANK: return PolicyKind::download_rank;
    case ML_POLICY_PERFORMANCE_RANK: return PolicyKind::performance_rank;
    case ML_POLICY_RANDOM_RANK: return PolicyKind::random_rank;
  }
  fail(errc::invalid_argument, "unknown policy code");
}

QualitySource to_quality_source(ml_quality_source s) {
  switch (s) {
    case ML_QUALITY_TRUE: return QualitySource::true_quality;
    case ML_QUALITY_ESTIMATED: return QualitySource::estimated_quality;
  }
  fail(errc::invalid_argument, "unknown quality source code");
}

MarketState state_from_downloads(const Market& market, const int64_t* downloads) {
  MarketState state = MarketState::zeros(market.size());
  if (downloads != nullptr) {
    state.downloads.assign(downloads, downloads + market.size());
    state.samples = state.downloads;  // samplings are at least the downloads
    state.validate(market.size());
  }
  return state;
}

Ranking ranking_from(const int32_t* position_of, int n, const char* what) {
  check_pointer(position_of, what);
  std::vector<int> pos(position_of, position_of + n);
  return Ranking::from_position_of(std::move(pos));
}

void copy_positions(const Ranking& ranking, int32_t* out) {
  for (int i = 0; i < ranking.size(); ++i) out[i] = ranking.position_of(i);
}

const Market& deref(const ml_market* market) {
  require(market != nullptr, errc::invalid_argument, "market handle must not be NULL");
  return market->market;
}

const WorldTrace& trace_at(const ml_experiment* experiment, int32_t world) {
  require(experiment != nullptr, errc::invalid_argument,
          "experiment handle must not be NULL");
  require(world >= 0 && world < static_cast<int32_t>(experiment->traces.size()),
          errc::invalid_argument, "world index out of range");
  return experiment->traces[static_cast<std::size_t>(world)];
}

const TraceSnapshot& snapshot_at(const ml_experiment* experiment, int32_t world,
                                 int32_t snapshot) {
  const WorldTrace& t = trace_at(experiment, world);
  require(snapshot >= 0 && snapshot < static_cast<int32_t>(t.snapshots.size()),
          errc::invalid_argument, "snapshot index out of range");
  return t.snapshots[static_cast<std::size_t>(snapshot)];
}

}  // namespace

extern "C" {

const char* ml_status_name(ml_status status) {
  switch (status) {
    case ML_OK: return "ok";
    case ML_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ML_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case ML_ERR_DEGENERATE_MARKET: return "degenerate market";
    case ML_ERR_UNSUPPORTED_TRANSFORM: return "unsupported transform";
    case ML_ERR_STATE_CORRUPTION: return "state corruption";
    case ML_ERR_SIZE_GUARD: return "size guard";
    case ML_ERR_NO_CONVERGENCE: return "no convergence";
    case ML_ERR_DATA: return "data error";
    case ML_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ml_last_error(void) { return tls_last_error.c_str(); }

const char* ml_version(void) { return "0.1.0"; }

ml_status ml_visibility_profile(int32_t n, double gamma, int32_t uptick_len,
                                double uptick_ratio, double* out_visibility) {
  return wrap([&] {
    check_pointer(out_visibility, "out_visibility");
    VisibilityParams params;
    params.gamma = gamma;
    params.uptick_len = uptick_len;
    params.uptick_ratio = uptick_ratio;
    const std::vector<double> v = visibility_profile(n, params);
    std::copy(v.begin(), v.end(), out_visibility);
  });
}

ml_status ml_gaussian_setting(int32_t n, uint64_t seed, double* out_appeal,
                              double* out_quality) {
  return wrap([&] {
    check_pointer(out_appeal, "out_appeal");
    check_pointer(out_quality, "out_quality");
    const QualityAppeal qa = gaussian_setting(n, seed);
    std::copy(qa.appeal.begin(), qa.appeal.end(), out_appeal);
    std::copy(qa.quality.begin(), qa.quality.end(), out_quality);
  });
}

ml_status ml_negative_correlation_setting(int32_t n, uint64_t seed, double jitter_sd,
                                          double* out_appeal, double* out_quality) {
  return wrap([&] {
    check_pointer(out_appeal, "out_appeal");
    check_pointer(out_quality, "out_quality");
    const QualityAppeal qa = negative_correlation_setting(n, seed, jitter_sd);
    std::copy(qa.appeal.begin(), qa.appeal.end(), out_appeal);
    std::copy(qa.quality.begin(), qa.quality.end(), out_quality);
  });
}

ml_status ml_market_create(int32_t n, const double* appeal, const double* quality,
                           const double* visibility, double alpha,
                           ml_transform influence, ml_market** out_market) {
  return wrap([&] {
    check_pointer(out_market, "out_market");
    check_pointer(appeal, "appeal");
    check_pointer(quality, "quality");
    check_pointer(visibility, "visibility");
    require(n >= 1, errc::invalid_argument, "n must be >= 1");
    Market market = Market::create(std::vector<double>(appeal, appeal + n),
                                   std::vector<double>(quality, quality + n),
                                   std::vector<double>(visibility, visibility + n), alpha,
                                   to_transform(influence));
    *out_market = new ml_market{std::move(market)};
  });
}

void ml_market_destroy(ml_market* market) { delete market; }

int32_t ml_market_size(const ml_market* market) {
  return market == nullptr ? 0 : market->market.size();
}

ml_status ml_sampling_probabilities(const ml_market* market, ml_condition condition,
                                    const int64_t* downloads, const int32_t* position_of,
                                    double* out_p) {
  return wrap([&] {
    const Market& m = deref(market);
    check_pointer(out_p, "out_p");
    const MarketState state = state_from_downloads(m, downloads);
    const AttractionVector attr = attraction(m, state, to_condition(condition));
    const Ranking ranking = ranking_from(position_of, m.size(), "position_of");
    const std::vector<double> p = sampling_probabilities(m, attr, ranking);
    std::copy(p.begin(), p.end(), out_p);
  });
}

ml_status ml_expected_downloads(const ml_market* market, ml_condition condition,
                                const int64_t* downloads, const double* quality,
                                const int32_t* position_of, double* out_value) {
  return wrap([&] {
    const Market& m = deref(market);
    check_pointer(out_value, "out_value");
    const MarketState state = state_from_downloads(m, downloads);
    const AttractionVector attr = attraction(m, state, to_condition(condition));
    const Ranking ranking = ranking_from(position_of, m.size(), "position_of");
    const std::span<const double> q =
        quality != nullptr
            ? std::span<const double>(quality, static_cast<std::size_t>(m.size()))
            : std::span<const double>(m.quality);
    *out_value = weighted_quality_ratio(m.visibility, attr.a, q, ranking);
  });
}

ml_status ml_one_step_expected_downloads(const ml_market* market, ml_condition condition,
                                         const int64_t* downloads,
                                         const int32_t* position_of_now,
                                         const int32_t* position_of_next,
                                         double* out_value) {
  return wrap([&] {
    const Market& m = deref(market);
    check_pointer(out_value, "out_value");
    const MarketState state = state_from_downloads(m, downloads);
    const AttractionVector attr = attraction(m, state, to_condition(condition));
    const Ranking now = ranking_from(position_of_now, m.size(), "position_of_now");
    const Ranking next = ranking_from(position_of_next, m.size(), "position_of_next");
    *out_value = one_step_expected_downloads(m, attr, now, next);
  });
}

ml_status ml_performance_ranking(const ml_market* market, ml_condition condition,
                                 const int64_t* downloads, const double* quality,
                                 ml_solver solver, int32_t* out_position_of,
                                 double* out_objective) {
  return wrap([&] {
    const Market& m = deref(market);
    check_pointer(out_position_of, "out_position_of");
    const MarketState state = state_from_downloads(m, downloads);
    const AttractionVector attr = attraction(m, state, to_condition(condition));
    const std::span<const double> q =
        quality != nullptr
            ? std::span<const double>(quality, static_cast<std::size_t>(m.size()))
            : std::span<const double>(m.quality);
    Ranking ranking;
    switch (solver) {
      case ML_SOLVER_PARAMETRIC:
        ranking = lfap::solve_performance_parametric(attr.a, q, m.visibility).ranking;
        break;
      case ML_SOLVER_LFAP:
        ranking = lfap::performance_ranking(m, attr, q);
        break;
      default:
        fail(errc::invalid_argument, "unknown solver code");
    }
    copy_positions(ranking, out_position_of);
    if (out_objective != nullptr)
      *out_objective = lfap::ranking_objective(attr.a, q, m.visibility, ranking);
  });
}

ml_status ml_download_ranking(int32_t n, const int64_t* downloads, int32_t* out_position_of) {
  return wrap([&] {
    check_pointer(downloads, "downloads");
    check_pointer(out_position_of, "out_position_of");
    require(n >= 1, errc::invalid_argument, "n must be >= 1");
    MarketState state = MarketState::zeros(n);
    state.downloads.assign(downloads, downloads + n);
    state.samples = state.downloads;
    copy_positions(download_ranking(state), out_position_of);
  });
}

ml_status ml_random_ranking(int32_t n, uint64_t seed, uint64_t stream,
                            int32_t* out_position_of) {
  return wrap([&] {
    check_pointer(out_position_of, "out_position_of");
    Rng rng(seed, stream);
    copy_positions(random_ranking(n, rng), out_position_of);
  });
}

uint64_t ml_ranking_hash(int32_t n, const int32_t* position_of) {
  if (n < 1 || position_of == nullptr) return 0;
  std::vector<int> pos(position_of, position_of + n);
  return permutation_hash(pos);
}

ml_status ml_solve_lfap(int32_t n, const double* cost, const double* weight,
                        int32_t* out_matching, double* out_objective) {
  return wrap([&] {
    check_pointer(cost, "cost");
    check_pointer(weight, "weight");
    check_pointer(out_matching, "out_matching");
    require(n >= 1, errc::invalid_argument, "n must be >= 1");
    const auto size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const lfap::LfapSolution solution = lfap::solve_lfap_dinkelbach(
        lfap::LfapInstance::create(n, std::vector<double>(cost, cost + size),
                                   std::vector<double>(weight, weight + size)));
    std::copy(solution.matching.begin(), solution.matching.end(), out_matching);
    if (out_objective != nullptr) *out_objective = solution.objective;
  });
}

void ml_sim_config_init(ml_sim_config* config) {
  if (config == nullptr) return;
  config->iterations = 20000;
  config->refresh_rate = 1;
  config->worlds = 400;
  config->master_seed = 0;
  config->snapshot_stride = 100;
  config->estimate_samples = 10;
  config->policy = ML_POLICY_PERFORMANCE_RANK;
  config->condition = ML_CONDITION_SOCIAL_INFLUENCE;
  config->quality_source = ML_QUALITY_ESTIMATED;
  config->threads = 0;
}

ml_status ml_run_experiment(const ml_market* market, const ml_sim_config* config,
                            ml_experiment** out_experiment) {
  return wrap([&] {
    const Market& m = deref(market);
    check_pointer(config, "config");
    check_pointer(out_experiment, "out_experiment");
    SimulationConfig sim;
    sim.iterations = config->iterations;
    sim.refresh_rate = config->refresh_rate;
    sim.worlds = config->worlds;
    sim.master_seed = config->master_seed;
    sim.snapshot_stride = config->snapshot_stride;
    sim.estimate_samples = config->estimate_samples;
    sim.policy.kind = to_policy(config->policy);
    sim.policy.condition = to_condition(config->condition);
    sim.policy.quality_source = to_quality_source(config->quality_source);
    sim.threads = config->threads;
    auto experiment = new ml_experiment;
    experiment->songs = m.size();
    try {
      experiment->traces = run_experiment(m, sim);
    } catch (...) {
      delete experiment;
      throw;
    }
    *out_experiment = experiment;
  });
}

void ml_experiment_destroy(ml_experiment* experiment) { delete experiment; }

int32_t ml_experiment_worlds(const ml_experiment* experiment) {
  return experiment == nullptr ? 0 : static_cast<int32_t>(experiment->traces.size());
}

int32_t ml_experiment_songs(const ml_experiment* experiment) {
  return experiment == nullptr ? 0 : experiment->songs;
}

int32_t ml_experiment_snapshots(const ml_experiment* experiment) {
  if (experiment == nullptr || experiment->traces.empty()) return 0;
  return static_cast<int32_t>(experiment->traces.front().snapshots.size());
}

int64_t ml_experiment_snapshot_step(const ml_experiment* experiment, int32_t snapshot) {
  if (experiment == nullptr || experiment->traces.empty()) return -1;
  const auto& snapshots = experiment->traces.front().snapshots;
  if (snapshot < 0 || snapshot >= static_cast<int32_t>(snapshots.size())) return -1;
  return snapshots[static_cast<std::size_t>(snapshot)].step;
}

ml_status ml_experiment_counts(const ml_experiment* experiment, int32_t world,
                               int32_t snapshot, int64_t* out_samples,
                               int64_t* out_downloads) {
  return wrap([&] {
    const TraceSnapshot& snap = snapshot_at(experiment, world, snapshot);
    if (out_samples != nullptr)
      std::copy(snap.samples.begin(), snap.samples.end(), out_samples);
    if (out_downloads != nullptr)
      std::copy(snap.downloads.begin(), snap.downloads.end(), out_downloads);
  });
}

ml_status ml_experiment_estimates(const ml_experiment* experiment, int32_t world,
                                  int32_t snapshot, double* out_estimates) {
  return wrap([&] {
    check_pointer(out_estimates, "out_estimates");
    const TraceSnapshot& snap = snapshot_at(experiment, world, snapshot);
    std::copy(snap.quality_estimate.begin(), snap.quality_estimate.end(), out_estimates);
  });
}

ml_status ml_experiment_ranking(const ml_experiment* experiment, int32_t world,
                                int32_t snapshot, int32_t* out_position_of,
                                uint64_t* out_hash) {
  return wrap([&] {
    const TraceSnapshot& snap = snapshot_at(experiment, world, snapshot);
    if (out_position_of != nullptr) copy_positions(snap.ranking, out_position_of);
    if (out_hash != nullptr) *out_hash = snap.ranking_hash;
  });
}

ml_status ml_market_shares(int32_t worlds, int32_t songs, const int64_t* final_downloads,
                           int32_t drop_zero_worlds, double* out_shares,
                           int32_t* out_world_index, int32_t* out_worlds_used) {
  return wrap([&] {
    check_pointer(final_downloads, "final_downloads");
    check_pointer(out_shares, "out_shares");
    check_pointer(out_worlds_used, "out_worlds_used");
    const metrics::MarketShares shares = metrics::market_shares_from_downloads(
        std::span<const int64_t>(final_downloads,
                                 static_cast<std::size_t>(worlds) * static_cast<std::size_t>(songs)),
        worlds, songs, drop_zero_worlds != 0);
    std::copy(shares.shares.begin(), shares.shares.end(), out_shares);
    if (out_world_index != nullptr)
      std::copy(shares.world_ids.begin(), shares.world_ids.end(), out_world_index);
    *out_worlds_used = shares.worlds;
  });
}

ml_status ml_unpredictability(int32_t worlds, int32_t songs, const double* shares,
                              double* out_per_song, double* out_overall) {
  return wrap([&] {
    check_pointer(shares, "shares");
    check_pointer(out_per_song, "out_per_song");
    check_pointer(out_overall, "out_overall");
    require(worlds >= 1 && songs >= 1, errc::invalid_argument, "worlds and songs must be >= 1");
    metrics::MarketShares ms;
    ms.worlds = worlds;
    ms.songs = songs;
    ms.shares.assign(shares,
                     shares + static_cast<std::size_t>(worlds) * static_cast<std::size_t>(songs));
    ms.world_ids.resize(static_cast<std::size_t>(worlds));
    std::iota(ms.world_ids.begin(), ms.world_ids.end(), 0);
    const metrics::UnpredictabilityReport report = metrics::unpredictability(ms);
    std::copy(report.per_song.begin(), report.per_song.end(), out_per_song);
    *out_overall = report.overall;
  });
}

ml_status ml_estimation_error_curve(int32_t worlds, int32_t snapshots, int32_t songs,
                                    const double* estimates, const double* true_quality,
                                    int32_t top_k, double* out_mse) {
  return wrap([&] {
    check_pointer(estimates, "estimates");
    check_pointer(true_quality, "true_quality");
    check_pointer(out_mse, "out_mse");
    require(worlds >= 1 && snapshots >= 1 && songs >= 1, errc::invalid_argument,
            "worlds, snapshots, and songs must be >= 1");
    const std::vector<int> top = metrics::top_quality_songs(
        std::span<const double>(true_quality, static_cast<std::size_t>(songs)), top_k);
    for (int32_t s = 0; s < snapshots; ++s) {
      double sum = 0.0;
      for (int32_t w = 0; w < worlds; ++w) {
        const double* est = estimates +
                            (static_cast<std::size_t>(w) * snapshots + static_cast<std::size_t>(s)) *
                                songs;
        double mse = 0.0;
        for (int song : top) {
          const double d = est[song] - true_quality[song];
          mse += d * d;
        }
        sum += mse / static_cast<double>(top.size());
      }
      out_mse[s] = sum / static_cast<double>(worlds);
    }
  });
}

ml_status ml_mean_curve(int32_t worlds, int32_t snapshots, const double* values,
                        double* out_mean, double* out_ci95_half) {
  return wrap([&] {
    check_pointer(values, "values");
    require(worlds >= 1 && snapshots >= 1, errc::invalid_argument,
            "worlds and snapshots must be >= 1");
    std::vector<double> column(static_cast<std::size_t>(worlds));
    for (int32_t s = 0; s < snapshots; ++s) {
      for (int32_t w = 0; w < worlds; ++w)
        column[static_cast<std::size_t>(w)] =
            values[static_cast<std::size_t>(w) * snapshots + static_cast<std::size_t>(s)];
      if (out_mean != nullptr) out_mean[s] = stats::mean(column);
      if (out_ci95_half != nullptr)
        out_ci95_half[s] = worlds >= 2 ? stats::ci95_half_width(column) : 0.0;
    }
  });
}

ml_status ml_quality_order(int32_t n, const double* quality, int32_t* out_song_order) {
  return wrap([&] {
    check_pointer(quality, "quality");
    check_pointer(out_song_order, "out_song_order");
    require(n >= 1, errc::invalid_argument, "n must be >= 1");
    std::vector<int32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int32_t lhs, int32_t rhs) {
      return quality[lhs] < quality[rhs];
    });
    std::copy(order.begin(), order.end(), out_song_order);
  });
}

}  // extern "C"
