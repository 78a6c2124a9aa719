#include "quality.hpp"

#include <string>

#include "errors.hpp"

namespace musiclab {

std::vector<double> QualityEstimate::q0() const {
  std::vector<double> out(initial_successes.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<double>(initial_successes[i]) / static_cast<double>(m);
  return out;
}

QualityEstimate QualityEstimate::from_successes(std::vector<std::int64_t> successes,
                                                std::int64_t m) {
  require(m >= 1, errc::invalid_argument, "initial sample size m must be >= 1");
  require(!successes.empty(), errc::invalid_argument, "estimate needs at least one song");
  for (std::int64_t s : successes)
    require(s >= 0 && s <= m, errc::invalid_argument, "successes must lie in [0, m]");
  QualityEstimate est;
  est.initial_successes = std::move(successes);
  est.m = m;
  return est;
}

QualityEstimate initial_estimate(std::span<const double> q_true, std::int64_t m, Rng& rng) {
  require(m >= 1, errc::invalid_argument, "initial sample size m must be >= 1");
  require(!q_true.empty(), errc::invalid_argument, "estimate needs at least one song");
  std::vector<std::int64_t> successes(q_true.size(), 0);
  for (std::size_t i = 0; i < q_true.size(); ++i)
    for (std::int64_t trial = 0; trial < m; ++trial)
      if (rng.bernoulli(q_true[i])) ++successes[i];
  return QualityEstimate::from_successes(std::move(successes), m);
}

void update_estimate_into(const QualityEstimate& est, const MarketState& state,
                          std::vector<double>& out) {
  const int n = est.size();
  state.validate(n);
  out.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    // Integer numerator/denominator; single rounding at the division.
    out[si] = static_cast<double>(est.initial_successes[si] + state.downloads[si]) /
              static_cast<double>(est.m + state.samples[si]);
  }
}

std::vector<double> update_estimate(const QualityEstimate& est, const MarketState& state) {
  std::vector<double> out;
  update_estimate_into(est, state, out);
  return out;
}

double estimation_error(std::span<const double> q_est, std::span<const double> q_true,
                        std::span<const int> subset) {
  require(q_est.size() == q_true.size(), errc::dimension_mismatch,
          "estimate and quality sizes differ");
  require(!subset.empty(), errc::invalid_argument, "estimation error needs a nonempty subset");
  double sum = 0.0;
  for (int i : subset) {
    require(i >= 0 && i < static_cast<int>(q_true.size()), errc::invalid_argument,
            "subset index out of range: " + std::to_string(i));
    const double d = q_est[static_cast<std::size_t>(i)] - q_true[static_cast<std::size_t>(i)];
    sum += d * d;
  }
  return sum / static_cast<double>(subset.size());
}

}  // namespace musiclab
