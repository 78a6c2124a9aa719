#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "stats.hpp"
#include "test_util.hpp"

using namespace musiclab;
using namespace musiclab::metrics;

namespace {

WorldTrace trace_with_final(int world_id, std::vector<std::int64_t> downloads) {
  WorldTrace t;
  t.world_id = world_id;
  t.final_state = MarketState::zeros(static_cast<int>(downloads.size()));
  t.final_state.samples = downloads;
  t.final_state.downloads = std::move(downloads);
  TraceSnapshot snap;
  snap.step = 1;
  snap.downloads = t.final_state.downloads;
  snap.samples = t.final_state.samples;
  snap.quality_estimate.assign(t.final_state.downloads.size(), 0.0);
  snap.ranking = Ranking::identity(static_cast<int>(t.final_state.downloads.size()));
  snap.ranking_hash = snap.ranking.hash();
  t.snapshots.push_back(std::move(snap));
  return t;
}

}  // namespace

TEST_CASE("market shares: hand cases") {
  const std::vector<WorldTrace> one{trace_with_final(0, {3, 1})};
  const MarketShares s1 = market_shares(one);
  CHECK(s1.at(0, 0) == 0.75);
  CHECK(s1.at(0, 1) == 0.25);

  const MarketShares s2 = market_shares(std::vector<WorldTrace>{trace_with_final(0, {0, 5})});
  CHECK(s2.at(0, 0) == 0.0);
  CHECK(s2.at(0, 1) == 1.0);

  const MarketShares s3 =
      market_shares(std::vector<WorldTrace>{trace_with_final(0, {2, 2, 2, 2})});
  for (int i = 0; i < 4; ++i) CHECK(s3.at(0, i) == 0.25);
}

TEST_CASE("market shares: zero-download world fails naming the world") {
  const std::vector<WorldTrace> traces{trace_with_final(0, {1, 2}),
                                       trace_with_final(1, {0, 0})};
  try {
    market_shares(traces);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::data_missing);
    CHECK(std::string(e.what()).find("world 1") != std::string::npos);
  }
  const MarketShares dropped = market_shares(traces, true);
  CHECK(dropped.worlds == 1);
  CHECK(dropped.world_ids == std::vector<int>{0});
}

TEST_CASE("unpredictability: identical worlds have zero unpredictability") {
  const std::vector<WorldTrace> traces{trace_with_final(0, {4, 6}), trace_with_final(1, {4, 6}),
                                       trace_with_final(2, {4, 6})};
  const UnpredictabilityReport report = unpredictability(market_shares(traces));
  CHECK(report.per_song == std::vector<double>{0.0, 0.0});
  CHECK(report.overall == 0.0);
}

TEST_CASE("unpredictability: opposite two-world market maximizes u") {
  const std::vector<WorldTrace> traces{trace_with_final(0, {7, 0}), trace_with_final(1, {0, 3})};
  const UnpredictabilityReport report = unpredictability(market_shares(traces));
  CHECK(report.per_song == std::vector<double>{1.0, 1.0});
  CHECK(report.overall == 1.0);
}

TEST_CASE("unpredictability: single song is fully predictable") {
  const std::vector<WorldTrace> traces{trace_with_final(0, {5}), trace_with_final(1, {9}),
                                       trace_with_final(2, {2})};
  const UnpredictabilityReport report = unpredictability(market_shares(traces));
  CHECK(report.per_song == std::vector<double>{0.0});
  CHECK(report.overall == 0.0);
}

TEST_CASE("unpredictability: needs two worlds") {
  CHECK_THROWS_AS(unpredictability(market_shares(std::vector<WorldTrace>{
                      trace_with_final(0, {1, 1})})),
                  Error);
}

TEST_CASE("unpredictability: bounds, exact mean, permutation invariance") {
  mltest::Rng rng(88, 0);
  std::vector<WorldTrace> traces;
  for (int w = 0; w < 6; ++w) {
    std::vector<std::int64_t> d(5);
    for (auto& x : d) x = 1 + static_cast<std::int64_t>(rng.below(30));
    traces.push_back(trace_with_final(w, std::move(d)));
  }
  const MarketShares shares = market_shares(traces);
  for (int w = 0; w < shares.worlds; ++w) {
    double sum = 0.0;
    for (int i = 0; i < shares.songs; ++i) sum += shares.at(w, i);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  const UnpredictabilityReport report = unpredictability(shares);
  for (double u : report.per_song) {
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
  }
  CHECK(report.overall == stats::mean(report.per_song));

  std::reverse(traces.begin(), traces.end());
  const UnpredictabilityReport reversed = unpredictability(market_shares(traces));
  for (std::size_t i = 0; i < report.per_song.size(); ++i)
    CHECK(std::abs(report.per_song[i] - reversed.per_song[i]) <= 1e-15);
}

TEST_CASE("quality-download distribution: ordering and world invariance") {
  const Market m = Market::create({1, 1, 1}, {0.9, 0.1, 0.5}, {3, 2, 1});
  std::vector<WorldTrace> traces{trace_with_final(0, {10, 20, 30}),
                                 trace_with_final(1, {1, 2, 3})};
  const auto dist = quality_download_distribution(traces, m);
  REQUIRE(dist.size() == 3);
  CHECK(dist[0].song == 1);  // quality 0.1 first
  CHECK(dist[1].song == 2);
  CHECK(dist[2].song == 0);
  CHECK(dist[0].downloads == std::vector<double>{20.0, 2.0});

  std::swap(traces[0], traces[1]);
  const auto swapped = quality_download_distribution(traces, m);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(swapped[i].song == dist[i].song);
    std::vector<double> a = dist[i].downloads, b = swapped[i].downloads;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("top quality songs: descending with index ties") {
  const std::vector<double> q{0.5, 0.9, 0.5, 0.1, 0.9};
  CHECK(top_quality_songs(q, 3) == std::vector<int>{1, 4, 0});
  CHECK(top_quality_songs(q, 5) == std::vector<int>{1, 4, 0, 2, 3});
  CHECK_THROWS_AS(top_quality_songs(q, 0), Error);
  CHECK_THROWS_AS(top_quality_songs(q, 6), Error);
}

TEST_CASE("estimation error curve: perfect estimates give zeros; top_k=n is the full MSE") {
  const Market m = Market::create({1, 1, 1}, {0.8, 0.2, 0.6}, {3, 2, 1});
  WorldTrace t;
  t.world_id = 0;
  t.final_state = MarketState::zeros(3);
  for (int s = 0; s < 4; ++s) {
    TraceSnapshot snap;
    snap.step = s;
    snap.downloads = {0, 0, 0};
    snap.samples = {0, 0, 0};
    snap.quality_estimate = s == 0 ? std::vector<double>{0.8, 0.2, 0.6}
                                   : std::vector<double>{0.7, 0.2, 0.6};
    snap.ranking = Ranking::identity(3);
    snap.ranking_hash = snap.ranking.hash();
    t.snapshots.push_back(std::move(snap));
  }
  const std::vector<WorldTrace> traces{t};
  const auto curve_top1 = estimation_error_curve(traces, m, 1);
  CHECK(curve_top1[0] == 0.0);
  CHECK(std::abs(curve_top1[1] - 0.01) <= 1e-15);  // top-1 is song 0

  const auto full = estimation_error_curve(traces, m, 3);
  CHECK(full[0] == 0.0);
  CHECK(std::abs(full[1] - 0.01 / 3.0) <= 1e-15);

  // Missing estimates are a data error.
  WorldTrace broken = t;
  broken.snapshots[2].quality_estimate.clear();
  CHECK_THROWS_AS(estimation_error_curve(std::vector<WorldTrace>{broken}, m, 2), Error);
}

TEST_CASE("mean downloads curve: hand check with two worlds") {
  std::vector<WorldTrace> traces{trace_with_final(0, {4, 0}), trace_with_final(1, {8, 0})};
  const auto curve = mean_downloads_curve(traces);
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].mean == 6.0);
  // sd = sqrt(((4-6)^2 + (8-6)^2)/1) = sqrt(8); half-width 1.96*sd/sqrt(2).
  CHECK(std::abs(curve[0].ci95_half - 1.96 * std::sqrt(8.0) / std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("stats: percentile and median definitions") {
  const std::vector<double> x{5, 1, 4, 2, 3};
  CHECK(stats::percentile(x, 0.0) == 1.0);
  CHECK(stats::percentile(x, 1.0) == 5.0);
  CHECK(stats::median(x) == 3.0);
  CHECK(stats::percentile(x, 0.05) == 1.0);
  const std::vector<double> even{1, 2, 3, 4};
  CHECK(stats::median(even) == 2.0);  // lower median by nearest rank
}
