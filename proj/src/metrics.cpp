#include "metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "stats.hpp"

namespace musiclab::metrics {

MarketShares market_shares_from_downloads(std::span<const std::int64_t> final_downloads,
                                          int worlds, int songs, bool drop_zero_worlds) {
  require(worlds >= 1 && songs >= 1, errc::invalid_argument, "shares need worlds and songs");
  require(final_downloads.size() ==
              static_cast<std::size_t>(worlds) * static_cast<std::size_t>(songs),
          errc::dimension_mismatch, "download matrix size mismatch");

  MarketShares out;
  out.songs = songs;
  for (int w = 0; w < worlds; ++w) {
    std::int64_t total = 0;
    for (int i = 0; i < songs; ++i)
      total += final_downloads[static_cast<std::size_t>(w) * songs + static_cast<std::size_t>(i)];
    if (total == 0) {
      if (drop_zero_worlds) continue;
      fail(errc::data_missing,
           "world " + std::to_string(w) + " has zero downloads; market share undefined");
    }
    for (int i = 0; i < songs; ++i)
      out.shares.push_back(
          static_cast<double>(
              final_downloads[static_cast<std::size_t>(w) * songs + static_cast<std::size_t>(i)]) /
          static_cast<double>(total));
    out.world_ids.push_back(w);
  }
  out.worlds = static_cast<int>(out.world_ids.size());
  require(out.worlds >= 1, errc::data_missing, "all worlds had zero downloads");
  return out;
}

MarketShares market_shares(std::span<const WorldTrace> traces, bool drop_zero_worlds) {
  require(!traces.empty(), errc::invalid_argument, "no traces");
  const int songs = static_cast<int>(traces.front().final_state.downloads.size());
  std::vector<std::int64_t> downloads;
  downloads.reserve(traces.size() * static_cast<std::size_t>(songs));
  for (const WorldTrace& t : traces) {
    require(static_cast<int>(t.final_state.downloads.size()) == songs, errc::dimension_mismatch,
            "traces disagree on song count");
    downloads.insert(downloads.end(), t.final_state.downloads.begin(),
                     t.final_state.downloads.end());
  }
  MarketShares out = market_shares_from_downloads(downloads, static_cast<int>(traces.size()),
                                                  songs, drop_zero_worlds);
  // Map row ids back to the trace's world ids.
  for (int& id : out.world_ids) id = traces[static_cast<std::size_t>(id)].world_id;
  return out;
}

UnpredictabilityReport unpredictability(const MarketShares& shares) {
  require(shares.worlds >= 2, errc::invalid_argument,
          "unpredictability needs at least two worlds");
  UnpredictabilityReport report;
  report.per_song.assign(static_cast<std::size_t>(shares.songs), 0.0);
  const double pairs = static_cast<double>(shares.worlds) *
                       static_cast<double>(shares.worlds - 1) / 2.0;
  for (int i = 0; i < shares.songs; ++i) {
    double sum = 0.0;
    for (int w = 0; w < shares.worlds; ++w)
      for (int w2 = w + 1; w2 < shares.worlds; ++w2)
        sum += std::abs(shares.at(w, i) - shares.at(w2, i));
    report.per_song[static_cast<std::size_t>(i)] = sum / pairs;
  }
  report.overall = stats::mean(report.per_song);
  return report;
}

namespace {

std::vector<int> songs_by_quality_ascending(std::span<const double> quality) {
  std::vector<int> order(quality.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return quality[static_cast<std::size_t>(lhs)] < quality[static_cast<std::size_t>(rhs)];
  });
  return order;
}

}  // namespace

std::vector<SongDownloadSamples> quality_download_distribution(
    std::span<const WorldTrace> traces, const Market& market) {
  require(!traces.empty(), errc::invalid_argument, "no traces");
  const int n = market.size();
  std::vector<SongDownloadSamples> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int song : songs_by_quality_ascending(market.quality)) {
    SongDownloadSamples samples;
    samples.song = song;
    samples.quality = market.quality[static_cast<std::size_t>(song)];
    samples.downloads.reserve(traces.size());
    for (const WorldTrace& t : traces) {
      require(static_cast<int>(t.final_state.downloads.size()) == n, errc::dimension_mismatch,
              "traces disagree on song count");
      samples.downloads.push_back(
          static_cast<double>(t.final_state.downloads[static_cast<std::size_t>(song)]));
    }
    out.push_back(std::move(samples));
  }
  return out;
}

std::vector<int> top_quality_songs(std::span<const double> quality, int top_k) {
  require(top_k >= 1 && top_k <= static_cast<int>(quality.size()), errc::invalid_argument,
          "top_k must lie in [1, n]");
  // Descending quality, ties by lower song index first.
  std::vector<int> order(quality.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return quality[static_cast<std::size_t>(lhs)] > quality[static_cast<std::size_t>(rhs)];
  });
  order.resize(static_cast<std::size_t>(top_k));
  return order;
}

std::vector<double> estimation_error_curve(std::span<const WorldTrace> traces,
                                           const Market& market, int top_k) {
  require(!traces.empty(), errc::invalid_argument, "no traces");
  const std::vector<int> top = top_quality_songs(market.quality, top_k);
  const std::size_t snapshots = traces.front().snapshots.size();
  require(snapshots >= 1, errc::data_missing, "traces carry no snapshots");

  std::vector<double> curve(snapshots, 0.0);
  for (const WorldTrace& t : traces) {
    require(t.snapshots.size() == snapshots, errc::data_missing,
            "world " + std::to_string(t.world_id) + " has a mismatched snapshot grid");
    for (std::size_t s = 0; s < snapshots; ++s) {
      const auto& est = t.snapshots[s].quality_estimate;
      require(est.size() == market.quality.size(), errc::data_missing,
              "world " + std::to_string(t.world_id) + " is missing estimate snapshots");
      double mse = 0.0;
      for (int song : top) {
        const double d = est[static_cast<std::size_t>(song)] -
                         market.quality[static_cast<std::size_t>(song)];
        mse += d * d;
      }
      curve[s] += mse / static_cast<double>(top.size());
    }
  }
  for (double& v : curve) v /= static_cast<double>(traces.size());
  return curve;
}

std::vector<CurvePoint> mean_downloads_curve(std::span<const WorldTrace> traces) {
  require(!traces.empty(), errc::invalid_argument, "no traces");
  const std::size_t snapshots = traces.front().snapshots.size();
  std::vector<CurvePoint> curve(snapshots);
  std::vector<double> totals(traces.size());
  for (std::size_t s = 0; s < snapshots; ++s) {
    for (std::size_t w = 0; w < traces.size(); ++w) {
      require(traces[w].snapshots.size() == snapshots, errc::data_missing,
              "world " + std::to_string(traces[w].world_id) + " has a mismatched snapshot grid");
      const auto& d = traces[w].snapshots[s].downloads;
      totals[w] = static_cast<double>(std::accumulate(d.begin(), d.end(), std::int64_t{0}));
    }
    curve[s].step = traces.front().snapshots[s].step;
    curve[s].mean = stats::mean(totals);
    curve[s].ci95_half = traces.size() >= 2 ? stats::ci95_half_width(totals) : 0.0;
  }
  return curve;
}

}  // namespace musiclab::metrics
