#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "lfap.hpp"
#include "policies.hpp"
#include "test_util.hpp"

using namespace musiclab;

namespace {

MarketState state_with(std::vector<std::int64_t> downloads) {
  MarketState s = MarketState::zeros(static_cast<int>(downloads.size()));
  s.samples = downloads;
  s.downloads = std::move(downloads);
  return s;
}

}  // namespace

TEST_CASE("download ranking: all ties give the identity") {
  CHECK(download_ranking(state_with({0, 0, 0})) == Ranking::identity(3));
}

TEST_CASE("download ranking: plain sort") {
  // D=(2,5,1): song 2 leads, then song 1, then song 3.
  const Ranking r = download_ranking(state_with({2, 5, 1}));
  CHECK(r.position_of(1) == 0);
  CHECK(r.position_of(0) == 1);
  CHECK(r.position_of(2) == 2);
}

TEST_CASE("download ranking: partial tie broken by song index") {
  // D=(3,3,7): order is song 3, song 1, song 2.
  const Ranking r = download_ranking(state_with({3, 3, 7}));
  CHECK(r.song_at(0) == 2);
  CHECK(r.song_at(1) == 0);
  CHECK(r.song_at(2) == 1);
}

TEST_CASE("download ranking: positions carry nonincreasing download counts") {
  Rng rng(12, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    MarketState state = mltest::random_state(rng, n);
    const Ranking r = download_ranking(state);
    for (int pos = 1; pos < n; ++pos)
      CHECK(state.downloads[static_cast<std::size_t>(r.song_at(pos))] <=
            state.downloads[static_cast<std::size_t>(r.song_at(pos - 1))]);
  }
}

TEST_CASE("random ranking: single song is the identity") {
  Rng rng(5, 0);
  CHECK(random_ranking(1, rng) == Ranking::identity(1));
}

TEST_CASE("random ranking: golden permutation for a fixed seed") {
  // Frozen output of the n-1 draw Fisher-Yates shuffle under Rng(2718, 0).
  Rng rng(2718, 0);
  const Ranking r = random_ranking(8, rng);
  const std::vector<int> expected{2, 0, 5, 3, 1, 6, 4, 7};
  CHECK(std::vector<int>(r.positions().begin(), r.positions().end()) == expected);
}

TEST_CASE("random ranking: chi-square uniformity of the position matrix") {
  // n=4, 1e5 shuffles: each (song, position) cell expects 25000. The
  // statistic is compared against the chi-square 0.999 quantile at
  // (n-1)^2 = 9 degrees of freedom.
  Rng rng(31337, 0);
  const int n = 4;
  const int draws = 100000;
  std::vector<int> counts(static_cast<std::size_t>(n * n), 0);
  for (int d = 0; d < draws; ++d) {
    const Ranking r = random_ranking(n, rng);
    for (int song = 0; song < n; ++song)
      ++counts[static_cast<std::size_t>(song * n + r.position_of(song))];
  }
  const double expected = static_cast<double>(draws) / n;
  double chi_sq = 0.0;
  for (int c : counts) {
    const double d = c - expected;
    chi_sq += d * d / expected;
  }
  CHECK(chi_sq < 27.877);  // chi2_{0.999, df=9}
}

TEST_CASE("policy engine: download ranking ignores quality input and rng") {
  const Market m = Market::create({1, 1, 1}, {0.9, 0.5, 0.1}, {3, 2, 1});
  const MarketState state = state_with({4, 9, 2});
  PolicyEngine engine({PolicyKind::download_rank, Condition::social_influence,
                       QualitySource::true_quality});
  Rng rng_a(1, 0);
  Rng rng_b(2, 0);
  const Ranking r1 = engine.apply(m, state, std::vector<double>{0.1, 0.2, 0.3}, rng_a);
  const Ranking r2 = engine.apply(m, state, std::vector<double>{0.9, 0.9, 0.9}, rng_b);
  CHECK(r1 == r2);
  CHECK(r1 == download_ranking(state));
  CHECK(rng_a.next_u64() == Rng(1, 0).next_u64());  // no draws consumed
}

TEST_CASE("policy engine: performance ranking matches the brute-force oracle") {
  Rng rng(606, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const Market m = mltest::random_market(rng, n);
    const MarketState state = mltest::random_state(rng, n);
    PolicyEngine engine({PolicyKind::performance_rank, Condition::social_influence,
                         QualitySource::true_quality});
    const Ranking r = engine.apply(m, state, {}, rng);
    const AttractionVector attr = attraction(m, state, Condition::social_influence);
    const double oracle = lfap::ranking_objective(
        attr.a, m.quality, m.visibility,
        lfap::brute_force_performance_ranking(attr.a, m.quality, m.visibility));
    CHECK(std::abs(lfap::ranking_objective(attr.a, m.quality, m.visibility, r) - oracle) <=
          1e-9);
  }
}

TEST_CASE("policy engine: estimated quality source feeds the optimizer") {
  const Market m = Market::create({1, 1}, {0.9, 0.1}, {2, 1});
  // Estimates that invert the true order must invert the playlist.
  PolicyEngine engine({PolicyKind::performance_rank, Condition::social_influence,
                       QualitySource::estimated_quality});
  Rng rng(1, 0);
  const Ranking r = engine.apply(m, MarketState::zeros(2), std::vector<double>{0.1, 0.9}, rng);
  CHECK(r.position_of(1) == 0);
  CHECK(r.position_of(0) == 1);
}

TEST_CASE("policy engine: P-rank(IN) is stationary within a run") {
  const Market m = Market::create({0.6, 0.3, 0.9}, {0.8, 0.4, 0.2}, {3, 2, 1});
  PolicyEngine engine({PolicyKind::performance_rank, Condition::independent,
                       QualitySource::true_quality});
  Rng rng(1, 0);
  const Ranking first = engine.apply(m, MarketState::zeros(3), {}, rng);
  for (int step = 0; step < 10; ++step) {
    MarketState state = state_with({static_cast<std::int64_t>(step * 7), 3, 1});
    CHECK(engine.apply(m, state, {}, rng) == first);
  }
}

TEST_CASE("policy engine: reproducible bit for bit with a fixed seed") {
  const Market m = Market::create({1, 1, 1, 1}, {0.2, 0.4, 0.6, 0.8}, {4, 3, 2, 1});
  for (PolicyKind kind :
       {PolicyKind::download_rank, PolicyKind::performance_rank, PolicyKind::random_rank}) {
    PolicyEngine a({kind, Condition::social_influence, QualitySource::true_quality});
    PolicyEngine b({kind, Condition::social_influence, QualitySource::true_quality});
    Rng rng_a(77, 4);
    Rng rng_b(77, 4);
    const MarketState state = state_with({5, 0, 2, 2});
    for (int step = 0; step < 5; ++step)
      CHECK(a.apply(m, state, {}, rng_a) == b.apply(m, state, {}, rng_b));
  }
}

TEST_CASE("policy names round-trip") {
  for (PolicyKind kind :
       {PolicyKind::download_rank, PolicyKind::performance_rank, PolicyKind::random_rank})
    CHECK(policy_kind_from_name(policy_kind_name(kind)) == kind);
  CHECK_THROWS_AS(policy_kind_from_name("quality-rank"), Error);
  CHECK_THROWS_AS(quality_source_from_name("guess"), Error);
}
