#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rng.hpp"

using musiclab::Rng;

TEST_CASE("same key gives the same stream") {
  Rng a(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams diverge") {
  Rng a(42, 0);
  Rng b(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("next_double stays in [0,1)") {
  Rng rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("below respects its bound and covers it") {
  Rng rng(9, 3);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++seen[static_cast<std::size_t>(v)];
  }
  for (int count : seen) CHECK(count > 8000);  // ~10000 expected per cell
}

TEST_CASE("bernoulli frequency tracks p") {
  Rng rng(5, 1);
  int hits = 0;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i)
    if (rng.bernoulli(0.3)) ++hits;
  const double freq = static_cast<double>(hits) / trials;
  CHECK(std::abs(freq - 0.3) < 0.005);
}

TEST_CASE("normal draws have unit moments") {
  Rng rng(123, 0);
  const int samples = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / samples;
  const double var = sum_sq / samples - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
