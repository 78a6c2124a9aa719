#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "market.hpp"
#include "simulator.hpp"

namespace musiclab::metrics {

// Final-step market shares, one row per world; each row sums to 1.
struct MarketShares {
  int worlds = 0;
  int songs = 0;
  std::vector<double> shares;       // worlds x songs, row-major
  std::vector<int> world_ids;       // original world id per row

  double at(int world, int song) const {
    return shares[static_cast<std::size_t>(world) * songs + static_cast<std::size_t>(song)];
  }
};

// drop_zero_worlds: silently skip worlds with no downloads at all instead of
// failing. The failure message names the first offending world.
MarketShares market_shares(std::span<const WorldTrace> traces, bool drop_zero_worlds = false);
MarketShares market_shares_from_downloads(std::span<const std::int64_t> final_downloads,
                                          int worlds, int songs, bool drop_zero_worlds = false);

struct UnpredictabilityReport {
  std::vector<double> per_song;  // u_i, mean pairwise |share difference|
  double overall = 0.0;          // U, mean of u_i
};

UnpredictabilityReport unpredictability(const MarketShares& shares);

// Final download counts per song across worlds, songs ordered by ascending
// true quality (ties by song index). Raw data behind the dot plots.
struct SongDownloadSamples {
  int song = 0;         // original song index
  double quality = 0.0; // true quality
  std::vector<double> downloads;  // one entry per world
};

std::vector<SongDownloadSamples> quality_download_distribution(
    std::span<const WorldTrace> traces, const Market& market);

// Songs with the top_k highest true qualities, ties by index.
std::vector<int> top_quality_songs(std::span<const double> quality, int top_k);

// Mean over worlds, per snapshot, of the squared estimate error averaged
// over the top_k true-quality songs.
std::vector<double> estimation_error_curve(std::span<const WorldTrace> traces,
                                           const Market& market, int top_k);

struct CurvePoint {
  std::int64_t step = 0;
  double mean = 0.0;
  double ci95_half = 0.0;
};

// Mean total downloads per snapshot across worlds.
std::vector<CurvePoint> mean_downloads_curve(std::span<const WorldTrace> traces);

}  // namespace musiclab::metrics
