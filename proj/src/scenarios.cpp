#include "scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace musiclab {

namespace {

// Min-max normalization onto [0,1]; the extremes map to exactly 0 and 1.
void normalize_unit(std::vector<double>& x) {
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  require(hi > lo, errc::invalid_argument, "degenerate draw: all values equal");
  for (double& v : x) v = (v - lo) / (hi - lo);
}

std::vector<double> normal_vector(int n, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.normal();
  return x;
}

}  // namespace

std::vector<double> visibility_profile(int n, const VisibilityParams& params) {
  require(n >= 1, errc::invalid_argument, "profile needs at least one position");
  require(params.gamma >= 0.0 && std::isfinite(params.gamma), errc::invalid_argument,
          "gamma must be >= 0");
  require(params.uptick_len >= 0, errc::invalid_argument, "uptick length must be >= 0");
  require(params.uptick_ratio >= 1.0 && std::isfinite(params.uptick_ratio),
          errc::invalid_argument, "uptick ratio must be >= 1");

  if (n == 1) return {1.0};
  require(n >= params.uptick_len + 1, errc::invalid_argument,
          "degenerate profile: need n >= uptick_len + 1");

  std::vector<double> v(static_cast<std::size_t>(n));
  const int head = n - params.uptick_len;  // positions on the power-law decay
  for (int p = 0; p < head; ++p)
    v[static_cast<std::size_t>(p)] = std::pow(static_cast<double>(p + 1), -params.gamma);
  const double floor = v[static_cast<std::size_t>(head - 1)];
  for (int j = 1; j <= params.uptick_len; ++j)
    v[static_cast<std::size_t>(head - 1 + j)] =
        floor * (1.0 + (params.uptick_ratio - 1.0) * static_cast<double>(j) /
                           static_cast<double>(params.uptick_len));

  for (double x : v)
    require(x > 0.0, errc::invalid_argument, "profile produced a nonpositive visibility");
  require(*std::max_element(v.begin(), v.end()) == v.front(), errc::invalid_argument,
          "uptick exceeds the top position's visibility; reduce uptick_ratio or grow n");
  return v;
}

QualityAppeal gaussian_setting(int n, std::uint64_t seed) {
  require(n >= 2, errc::invalid_argument, "gaussian setting needs n >= 2");
  Rng rng(seed, 0);
  QualityAppeal out;
  out.appeal = normal_vector(n, rng);
  out.quality = normal_vector(n, rng);
  normalize_unit(out.appeal);
  normalize_unit(out.quality);
  return out;
}

QualityAppeal negative_correlation_setting(int n, std::uint64_t seed, double jitter_sd) {
  require(n >= 2, errc::invalid_argument, "negative-correlation setting needs n >= 2");
  require(jitter_sd >= 0.0 && std::isfinite(jitter_sd), errc::invalid_argument,
          "jitter stddev must be >= 0");
  Rng rng(seed, 0);
  QualityAppeal out;
  out.quality = normal_vector(n, rng);
  normalize_unit(out.quality);
  out.appeal.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    out.appeal[si] = std::clamp(1.0 - out.quality[si] + jitter_sd * rng.normal(), 0.0, 1.0);
  }
  normalize_unit(out.appeal);
  return out;
}

}  // namespace musiclab
