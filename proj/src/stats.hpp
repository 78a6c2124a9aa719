#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "errors.hpp"

namespace musiclab::stats {

inline double mean(std::span<const double> x) {
  require(!x.empty(), errc::invalid_argument, "mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
  require(x.size() >= 2, errc::invalid_argument, "variance needs at least two samples");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

// Normal-approximation half-width of the 95% confidence interval of the mean.
inline double ci95_half_width(std::span<const double> x) {
  return 1.96 * sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
}

// Nearest-rank percentile, p in [0,1]; p = 0.5 gives the lower median.
inline double percentile(std::vector<double> x, double p) {
  require(!x.empty(), errc::invalid_argument, "percentile of empty sample");
  require(p >= 0.0 && p <= 1.0, errc::invalid_argument, "percentile p must lie in [0,1]");
  std::sort(x.begin(), x.end());
  const auto rank = static_cast<std::size_t>(
      std::max(1.0, std::ceil(p * static_cast<double>(x.size()))));
  return x[rank - 1];
}

inline double median(std::vector<double> x) { return percentile(std::move(x), 0.5); }

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, errc::invalid_argument,
          "correlation needs two equally sized samples");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, errc::invalid_argument, "correlation of a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace musiclab::stats
