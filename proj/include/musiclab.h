/* musiclab — cultural-market simulator and expected-download ranking
 * optimizer, exposed as a C shared-library API.
 *
 * Conventions:
 *   - Every fallible call returns ml_status; ML_OK is 0. On failure,
 *     ml_last_error() returns a thread-local message for the failing call.
 *   - Songs and playlist positions are 0-based. position_of arrays map a
 *     song index to the playlist position it occupies.
 *   - Output buffers are caller-allocated; sizes are stated per function.
 *   - Opaque handles are destroyed with their matching *_destroy function;
 *     destroy functions accept NULL.
 */
#ifndef MUSICLAB_H
#define MUSICLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ml_status {
  ML_OK = 0,
  ML_ERR_INVALID_ARGUMENT = 1,
  ML_ERR_DIMENSION_MISMATCH = 2,
  ML_ERR_DEGENERATE_MARKET = 3,
  ML_ERR_UNSUPPORTED_TRANSFORM = 4,
  ML_ERR_STATE_CORRUPTION = 5,
  ML_ERR_SIZE_GUARD = 6,
  ML_ERR_NO_CONVERGENCE = 7,
  ML_ERR_DATA = 8,
  ML_ERR_INTERNAL = 9
} ml_status;

const char* ml_status_name(ml_status status);

/* Message for the most recent failure on the calling thread. */
const char* ml_last_error(void);

const char* ml_version(void);

/* Positive nondecreasing transform applied to download counts. */
typedef enum ml_transform {
  ML_TRANSFORM_IDENTITY = 0,
  ML_TRANSFORM_LOG1P = 1,
  ML_TRANSFORM_SQRT = 2
} ml_transform;

/* Whether participants see download counts. */
typedef enum ml_condition {
  ML_CONDITION_SOCIAL_INFLUENCE = 0,
  ML_CONDITION_INDEPENDENT = 1
} ml_condition;

typedef enum ml_policy {
  ML_POLICY_DOWNLOAD_RANK = 0,
  ML_POLICY_PERFORMANCE_RANK = 1,
  ML_POLICY_RANDOM_RANK = 2
} ml_policy;

typedef enum ml_quality_source {
  ML_QUALITY_TRUE = 0,
  ML_QUALITY_ESTIMATED = 1
} ml_quality_source;

typedef enum ml_solver {
  ML_SOLVER_PARAMETRIC = 0, /* Dinkelbach on the sorted parametric form */
  ML_SOLVER_LFAP = 1        /* general fractional-assignment reduction */
} ml_solver;

/* ------------------------------------------------------------------ */
/* Scenario generation                                                 */
/* ------------------------------------------------------------------ */

/* Power-law visibility with a linear up-tick over the last uptick_len
 * positions. Defaults used by the CLI: gamma 0.8, uptick_len 5,
 * uptick_ratio 1.2. out_visibility must hold n doubles. */
ml_status ml_visibility_profile(int32_t n, double gamma, int32_t uptick_len,
                                double uptick_ratio, double* out_visibility);

/* Independent Gaussian appeal/quality, each min-max normalized to [0,1].
 * out_appeal and out_quality must hold n doubles each. */
ml_status ml_gaussian_setting(int32_t n, uint64_t seed, double* out_appeal,
                              double* out_quality);

/* Appeal mirrored against quality (1 - q plus Gaussian jitter, clamped,
 * re-normalized); Pearson correlation is <= -0.9 for the default jitter. */
ml_status ml_negative_correlation_setting(int32_t n, uint64_t seed, double jitter_sd,
                                          double* out_appeal, double* out_quality);

/* ------------------------------------------------------------------ */
/* Market                                                              */
/* ------------------------------------------------------------------ */

typedef struct ml_market ml_market;

/* appeal: A_i >= 0 (at least one positive); quality: q_i in [0,1];
 * visibility: v_p > 0; alpha > 0. Arrays of n doubles, copied. */
ml_status ml_market_create(int32_t n, const double* appeal, const double* quality,
                           const double* visibility, double alpha,
                           ml_transform influence, ml_market** out_market);
void ml_market_destroy(ml_market* market);
int32_t ml_market_size(const ml_market* market);

/* ------------------------------------------------------------------ */
/* Model quantities                                                    */
/* ------------------------------------------------------------------ */

/* downloads may be NULL for the all-zero state (n int64 otherwise).
 * out_p must hold n doubles; the result sums to 1. */
ml_status ml_sampling_probabilities(const ml_market* market, ml_condition condition,
                                    const int64_t* downloads, const int32_t* position_of,
                                    double* out_p);

/* Expected downloads of the next participant under the given ranking.
 * quality may be NULL to use the market's true qualities. */
ml_status ml_expected_downloads(const ml_market* market, ml_condition condition,
                                const int64_t* downloads, const double* quality,
                                const int32_t* position_of, double* out_value);

/* Expected downloads at t+1 conditional on t (identity transform only). */
ml_status ml_one_step_expected_downloads(const ml_market* market, ml_condition condition,
                                         const int64_t* downloads,
                                         const int32_t* position_of_now,
                                         const int32_t* position_of_next, double* out_value);

/* ------------------------------------------------------------------ */
/* Ranking policies and solvers                                        */
/* ------------------------------------------------------------------ */

/* The expected-download-maximizing ranking. quality may be NULL to use the
 * market's true qualities; out_objective may be NULL. */
ml_status ml_performance_ranking(const ml_market* market, ml_condition condition,
                                 const int64_t* downloads, const double* quality,
                                 ml_solver solver, int32_t* out_position_of,
                                 double* out_objective);

ml_status ml_download_ranking(int32_t n, const int64_t* downloads, int32_t* out_position_of);

/* Uniform random ranking from the (seed, stream) rng; consumes n-1 draws. */
ml_status ml_random_ranking(int32_t n, uint64_t seed, uint64_t stream,
                            int32_t* out_position_of);

/* Stable FNV-1a digest of a permutation, as written in trace files. */
uint64_t ml_ranking_hash(int32_t n, const int32_t* position_of);

/* Minimize sum(cost)/sum(weight) over perfect matchings; weight > 0.
 * Matrices are row-major n*n; out_matching holds the matched column per
 * row. out_objective may be NULL. */
ml_status ml_solve_lfap(int32_t n, const double* cost, const double* weight,
                        int32_t* out_matching, double* out_objective);

/* ------------------------------------------------------------------ */
/* Simulation                                                          */
/* ------------------------------------------------------------------ */

typedef struct ml_sim_config {
  int64_t iterations;       /* N, participants per world */
  int64_t refresh_rate;     /* r, iterations between playlist refreshes */
  int32_t worlds;           /* W */
  uint64_t master_seed;     /* world w uses rng stream (master_seed, w) */
  int64_t snapshot_stride;  /* trace snapshot interval */
  int64_t estimate_samples; /* m, initial Bernoulli trials per song */
  ml_policy policy;
  ml_condition condition;
  ml_quality_source quality_source;
  int32_t threads;          /* 0 = hardware concurrency */
} ml_sim_config;

/* Paper-scale defaults: N=20000, r=1, W=400, stride=100, m=10,
 * p-rank under social influence with estimated quality, seed 0. */
void ml_sim_config_init(ml_sim_config* config);

typedef struct ml_experiment ml_experiment;

/* Runs W independent worlds. Deterministic in (market, config); the thread
 * count does not affect results. */
ml_status ml_run_experiment(const ml_market* market, const ml_sim_config* config,
                            ml_experiment** out_experiment);
void ml_experiment_destroy(ml_experiment* experiment);

int32_t ml_experiment_worlds(const ml_experiment* experiment);
int32_t ml_experiment_songs(const ml_experiment* experiment);
int32_t ml_experiment_snapshots(const ml_experiment* experiment);
/* Step of the given snapshot index, or -1 if out of range. */
int64_t ml_experiment_snapshot_step(const ml_experiment* experiment, int32_t snapshot);

/* Per-song counters at a snapshot; either output may be NULL (n int64). */
ml_status ml_experiment_counts(const ml_experiment* experiment, int32_t world,
                               int32_t snapshot, int64_t* out_samples,
                               int64_t* out_downloads);

/* Running quality estimates at a snapshot (n doubles). */
ml_status ml_experiment_estimates(const ml_experiment* experiment, int32_t world,
                                  int32_t snapshot, double* out_estimates);

/* Ranking in force at a snapshot; out_position_of (n int32) and out_hash
 * may each be NULL. */
ml_status ml_experiment_ranking(const ml_experiment* experiment, int32_t world,
                                int32_t snapshot, int32_t* out_position_of,
                                uint64_t* out_hash);

/* ------------------------------------------------------------------ */
/* Metrics                                                             */
/* ------------------------------------------------------------------ */

/* Market shares from a worlds x songs matrix of final download counts.
 * A world with zero downloads is an error unless drop_zero_worlds != 0, in
 * which case it is skipped. out_shares must hold worlds*songs doubles and
 * is filled with out_worlds_used rows; out_world_index (worlds int32, may
 * be NULL) receives the original world of each kept row. */
ml_status ml_market_shares(int32_t worlds, int32_t songs, const int64_t* final_downloads,
                           int32_t drop_zero_worlds, double* out_shares,
                           int32_t* out_world_index, int32_t* out_worlds_used);

/* u_i = mean |share difference| over world pairs; U = mean of u_i.
 * shares is worlds x songs row-major; out_per_song holds songs doubles. */
ml_status ml_unpredictability(int32_t worlds, int32_t songs, const double* shares,
                              double* out_per_song, double* out_overall);

/* Mean squared estimate error over the top_k true-quality songs, averaged
 * over worlds, one value per snapshot. estimates is worlds x snapshots x
 * songs row-major; out_mse holds snapshots doubles. */
ml_status ml_estimation_error_curve(int32_t worlds, int32_t snapshots, int32_t songs,
                                    const double* estimates, const double* true_quality,
                                    int32_t top_k, double* out_mse);

/* Column means and 95% CI half-widths of a worlds x snapshots matrix.
 * Either output may be NULL (snapshots doubles each). */
ml_status ml_mean_curve(int32_t worlds, int32_t snapshots, const double* values,
                        double* out_mean, double* out_ci95_half);

/* Song indices sorted by ascending quality, ties by index (n int32). */
ml_status ml_quality_order(int32_t n, const double* quality, int32_t* out_song_order);

#ifdef __cplusplus
}
#endif

#endif /* MUSICLAB_H */
