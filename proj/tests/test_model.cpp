#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "lfap.hpp"
#include "market.hpp"
#include "model.hpp"
#include "test_util.hpp"

using namespace musiclab;
using mltest::random_instance;
using mltest::shuffled_ranking;

namespace {

Market two_song_market(double alpha = 1.0, Transform f = Transform::identity) {
  return Market::create({0.5, 0.2}, {0.9, 0.1}, {2.0, 1.0}, alpha, f);
}

MarketState state_with(std::vector<std::int64_t> downloads) {
  MarketState s = MarketState::zeros(static_cast<int>(downloads.size()));
  s.samples = downloads;
  s.downloads = std::move(downloads);
  return s;
}

}  // namespace

TEST_CASE("attraction adds downloads under social influence") {
  const Market m = two_song_market();
  const AttractionVector a = attraction(m, state_with({3, 0}), Condition::social_influence);
  CHECK(a.a[0] == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(a.a[1] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("attraction ignores downloads under the independent condition") {
  const Market m = two_song_market();
  const AttractionVector a = attraction(m, state_with({3, 0}), Condition::independent);
  CHECK(a.a[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.a[1] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("attraction applies the influence transform") {
  const Market m =
      Market::create({0.1, 0.3, 0.6}, {0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}, 2.0, Transform::log1p);
  const AttractionVector a = attraction(m, state_with({4, 1, 0}), Condition::social_influence);
  CHECK(std::abs(a.a[0] - (0.2 + std::log(5.0))) <= 1e-15);
  CHECK(std::abs(a.a[1] - (0.6 + std::log(2.0))) <= 1e-15);
  CHECK(std::abs(a.a[2] - 1.2) <= 1e-15);
}

TEST_CASE("attraction rejects mismatched state dimensions") {
  const Market m = two_song_market();
  CHECK_THROWS_AS(attraction(m, MarketState::zeros(3), Condition::social_influence), Error);
}

TEST_CASE("market invariants are enforced") {
  CHECK_THROWS_AS(Market::create({0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}), Error);      // no appeal
  CHECK_THROWS_AS(Market::create({1.0, 1.0}, {0.5, 1.5}, {1.0, 1.0}), Error);      // q > 1
  CHECK_THROWS_AS(Market::create({1.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}), Error);      // v = 0
  CHECK_THROWS_AS(Market::create({1.0, 1.0}, {0.5, 0.5}, {1.0, 1.0}, 0.0), Error); // alpha
  MarketState bad = MarketState::zeros(2);
  bad.downloads[0] = 1;  // download without sampling
  CHECK_THROWS_AS(bad.validate(2), Error);
}

TEST_CASE("sampling probabilities: single song") {
  const Market m = Market::create({1.0}, {0.5}, {1.0});
  const auto p = sampling_probabilities(m, attraction(m, MarketState::zeros(1),
                                                      Condition::social_influence),
                                        Ranking::identity(1));
  CHECK(p.size() == 1);
  CHECK(p[0] == 1.0);
}

TEST_CASE("sampling probabilities: symmetric market is uniform") {
  const Market m = Market::create({1, 1, 1, 1}, {0.5, 0.5, 0.5, 0.5}, {1, 1, 1, 1});
  mltest::Rng rng(11, 0);
  const auto p = sampling_probabilities(
      m, attraction(m, MarketState::zeros(4), Condition::social_influence),
      shuffled_ranking(rng, 4));
  for (double v : p) CHECK(std::abs(v - 0.25) <= 1e-15);
}

TEST_CASE("sampling probabilities: hand-evaluated two-song case") {
  // v=(2,1), a=(1,3) under identity: p = (2/(2+3), 3/(2+3)).
  const Market m = Market::create({1.0, 3.0}, {0.5, 0.5}, {2.0, 1.0});
  const auto p = sampling_probabilities(
      m, attraction(m, MarketState::zeros(2), Condition::social_influence),
      Ranking::identity(2));
  CHECK(std::abs(p[0] - 0.4) <= 1e-15);
  CHECK(std::abs(p[1] - 0.6) <= 1e-15);
}

TEST_CASE("property: probabilities are a distribution") {
  mltest::Rng rng(2024, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const auto inst = random_instance(rng, n, n >= 2 && trial % 3 == 0);
    AttractionVector attr{inst.a};
    const Market m = Market::create(std::vector<double>(static_cast<std::size_t>(n), 1.0),
                                    inst.q, inst.v);
    const auto p = sampling_probabilities(m, attr, shuffled_ranking(rng, n));
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("expected downloads of a constant-quality market is that constant") {
  mltest::Rng rng(7, 0);
  const Market m = Market::create({0.3, 1.2, 0.7}, {0.42, 0.42, 0.42}, {3.0, 2.0, 1.0});
  for (int trial = 0; trial < 20; ++trial) {
    const double value =
        expected_downloads(m, attraction(m, mltest::random_state(rng, 3),
                                         Condition::social_influence),
                           shuffled_ranking(rng, 3));
    CHECK(std::abs(value - 0.42) <= 1e-12);
  }
}

TEST_CASE("expected downloads: hand-evaluated case") {
  const Market m = Market::create({1.0, 1.0}, {1.0, 0.0}, {2.0, 1.0});
  const double value = expected_downloads(
      m, attraction(m, MarketState::zeros(2), Condition::social_influence),
      Ranking::identity(2));
  CHECK(std::abs(value - 2.0 / 3.0) <= 1e-15);
}

TEST_CASE("expected downloads equals the probability-weighted quality sum") {
  mltest::Rng rng(99, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const Market m = mltest::random_market(rng, n);
    const AttractionVector attr =
        attraction(m, mltest::random_state(rng, n), Condition::social_influence);
    const Ranking sigma = shuffled_ranking(rng, n);
    const auto p = sampling_probabilities(m, attr, sigma);
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += p[static_cast<std::size_t>(i)] * m.quality[static_cast<std::size_t>(i)];
    CHECK(std::abs(expected_downloads(m, attr, sigma) - dot) <= 1e-12);
    const auto [lo, hi] = std::minmax_element(m.quality.begin(), m.quality.end());
    CHECK(expected_downloads(m, attr, sigma) >= *lo - 1e-12);
    CHECK(expected_downloads(m, attr, sigma) <= *hi + 1e-12);
  }
}

TEST_CASE("property: uniform attraction scaling changes nothing") {
  mltest::Rng rng(31, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const Market m = mltest::random_market(rng, n);
    const Ranking sigma = shuffled_ranking(rng, n);
    AttractionVector attr =
        attraction(m, mltest::random_state(rng, n), Condition::social_influence);
    AttractionVector scaled = attr;
    const double c = rng.uniform(0.01, 50.0);
    for (double& v : scaled.a) v *= c;
    const auto p1 = sampling_probabilities(m, attr, sigma);
    const auto p2 = sampling_probabilities(m, scaled, sigma);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(p1[static_cast<std::size_t>(i)] - p2[static_cast<std::size_t>(i)]) <= 1e-12);
    CHECK(std::abs(expected_downloads(m, attr, sigma) - expected_downloads(m, scaled, sigma)) <=
          1e-12);
  }
}

TEST_CASE("property: independent-condition probabilities ignore history") {
  mltest::Rng rng(55, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const Market m = mltest::random_market(rng, n);
    const Ranking sigma = shuffled_ranking(rng, n);
    const auto p0 = sampling_probabilities(
        m, attraction(m, MarketState::zeros(n), Condition::independent), sigma);
    const auto p1 = sampling_probabilities(
        m, attraction(m, mltest::random_state(rng, n, 500), Condition::independent), sigma);
    for (int i = 0; i < n; ++i)
      CHECK(p0[static_cast<std::size_t>(i)] == p1[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("property: one more download strictly helps that song only") {
  mltest::Rng rng(77, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const Market m = mltest::random_market(rng, n);
    const Ranking sigma = shuffled_ranking(rng, n);
    MarketState state = mltest::random_state(rng, n);
    const auto before = sampling_probabilities(
        m, attraction(m, state, Condition::social_influence), sigma);
    const int boosted = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    ++state.downloads[static_cast<std::size_t>(boosted)];
    ++state.samples[static_cast<std::size_t>(boosted)];
    const auto after = sampling_probabilities(
        m, attraction(m, state, Condition::social_influence), sigma);
    for (int i = 0; i < n; ++i) {
      if (i == boosted)
        CHECK(after[static_cast<std::size_t>(i)] > before[static_cast<std::size_t>(i)]);
      else
        CHECK(after[static_cast<std::size_t>(i)] < before[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("one-step expectation: single song is its quality") {
  const Market m = Market::create({1.0}, {0.7}, {1.0});
  const AttractionVector attr =
      attraction(m, MarketState::zeros(1), Condition::social_influence);
  CHECK(std::abs(one_step_expected_downloads(m, attr, Ranking::identity(1),
                                             Ranking::identity(1)) -
                 0.7) <= 1e-15);
}

TEST_CASE("one-step expectation matches event-tree enumeration") {
  // v=(2,1), a=(1,1), q=(0.9,0.1), sigma = sigma' = identity. The oracle
  // enumerates the disjoint events (song j sampled & downloaded) plus the
  // no-download branch.
  const Market m = Market::create({1.0, 1.0}, {0.9, 0.1}, {2.0, 1.0});
  const AttractionVector attr =
      attraction(m, MarketState::zeros(2), Condition::social_influence);
  const Ranking sigma = Ranking::identity(2);

  const double den = 2.0 * 1.0 + 1.0 * 1.0;
  const double expect_now = (2.0 * 1.0 * 0.9 + 1.0 * 1.0 * 0.1) / den;
  double oracle = 0.0;
  // song 1 sampled (p=2/3) and downloaded (0.9): a -> (2,1)
  oracle += (2.0 / den) * 0.9 * ((2.0 * 2.0 * 0.9 + 1.0 * 1.0 * 0.1) / (2.0 * 2.0 + 1.0 * 1.0));
  // song 2 sampled (p=1/3) and downloaded (0.1): a -> (1,2)
  oracle += (1.0 / den) * 0.1 * ((2.0 * 1.0 * 0.9 + 1.0 * 2.0 * 0.1) / (2.0 * 1.0 + 1.0 * 2.0));
  // no download
  oracle += (1.0 - expect_now) * expect_now;

  const double value = one_step_expected_downloads(m, attr, sigma, sigma);
  CHECK(std::abs(value - oracle) <= 1e-12);
}

TEST_CASE("one-step expectation rejects non-identity transforms") {
  const Market m = two_song_market(1.0, Transform::log1p);
  const AttractionVector attr =
      attraction(m, MarketState::zeros(2), Condition::social_influence);
  CHECK_THROWS_AS(
      one_step_expected_downloads(m, attr, Ranking::identity(2), Ranking::identity(2)), Error);
}

TEST_CASE("property: re-optimizing the next step cannot hurt") {
  // max over sigma' of E[D_{t+1}^{sigma*,sigma'}] is attained at least at
  // sigma' = sigma*, so the brute-force max must dominate.
  mltest::Rng rng(404, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));  // n <= 6
    const auto inst = random_instance(rng, n);
    const Market m = Market::create(inst.a, inst.q, inst.v);
    const AttractionVector attr =
        attraction(m, MarketState::zeros(n), Condition::social_influence);
    const Ranking sigma_star = lfap::brute_force_performance_ranking(attr.a, inst.q, inst.v);
    const double stay = one_step_expected_downloads(m, attr, sigma_star, sigma_star);
    const Ranking best_next = lfap::brute_force_ranking(n, [&](const Ranking& r) {
      return one_step_expected_downloads(m, attr, sigma_star, r);
    });
    const double reopt = one_step_expected_downloads(m, attr, sigma_star, best_next);
    CHECK(reopt >= stay - 1e-9);
  }
}

TEST_CASE("property: performance ranking never loses in expectation (one step)") {
  mltest::Rng rng(808, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));  // n <= 10
    auto inst = random_instance(rng, n);
    std::sort(inst.v.begin(), inst.v.end(), std::greater<>());
    const Market m = Market::create(inst.a, inst.q, inst.v);
    const AttractionVector attr =
        attraction(m, MarketState::zeros(n), Condition::social_influence);
    const Ranking sigma_star =
        lfap::solve_performance_parametric(attr.a, inst.q, inst.v).ranking;
    const double now = expected_downloads(m, attr, sigma_star);
    const double next = one_step_expected_downloads(m, attr, sigma_star, sigma_star);
    CHECK(next >= now - 1e-9);
  }
}
