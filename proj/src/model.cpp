#include "model.hpp"

#include "errors.hpp"

namespace musiclab {

void AttractionVector::validate() const {
  bool any_positive = false;
  for (double v : a) {
    require(v >= 0.0, errc::invalid_argument, "attraction must be >= 0");
    any_positive = any_positive || v > 0.0;
  }
  require(any_positive, errc::degenerate_market, "all attractions are zero");
}

void attraction_into(const Market& market, const MarketState& state, Condition condition,
                     std::vector<double>& out) {
  const int n = market.size();
  state.validate(n);
  out.resize(static_cast<std::size_t>(n));
  bool any_positive = false;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    double a = market.alpha * market.appeal[si];
    if (condition == Condition::social_influence)
      a += apply_transform(market.influence, static_cast<double>(state.downloads[si]));
    out[si] = a;
    any_positive = any_positive || a > 0.0;
  }
  require(any_positive, errc::degenerate_market, "all attractions are zero");
}

AttractionVector attraction(const Market& market, const MarketState& state, Condition condition) {
  AttractionVector out;
  attraction_into(market, state, condition, out.a);
  return out;
}

double fill_sampling_weights(std::span<const double> visibility, std::span<const double> a,
                             const Ranking& ranking, std::vector<double>& w) {
  const int n = static_cast<int>(a.size());
  require(ranking.size() == n, errc::dimension_mismatch, "ranking size does not match market");
  require(static_cast<int>(visibility.size()) == n, errc::dimension_mismatch,
          "visibility size does not match attraction");
  w.resize(a.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    w[si] = visibility[static_cast<std::size_t>(ranking.position_of(i))] * a[si];
    total += w[si];
  }
  require(total > 0.0, errc::degenerate_market, "zero total sampling weight");
  return total;
}

std::vector<double> sampling_probabilities(const Market& market, const AttractionVector& a,
                                           const Ranking& ranking) {
  require(a.size() == market.size(), errc::dimension_mismatch,
          "attraction size does not match market");
  std::vector<double> p;
  const double total = fill_sampling_weights(market.visibility, a.a, ranking, p);
  for (double& v : p) v /= total;
  return p;
}

double weighted_quality_ratio(std::span<const double> visibility, std::span<const double> a,
                              std::span<const double> quality, const Ranking& ranking) {
  const int n = static_cast<int>(a.size());
  require(static_cast<int>(quality.size()) == n, errc::dimension_mismatch,
          "quality size does not match attraction");
  require(ranking.size() == n, errc::dimension_mismatch, "ranking size does not match market");
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const double w = visibility[static_cast<std::size_t>(ranking.position_of(i))] * a[si];
    num += w * quality[si];
    den += w;
  }
  require(den > 0.0, errc::degenerate_market, "zero total sampling weight");
  return num / den;
}

double expected_downloads(const Market& market, const AttractionVector& a, const Ranking& ranking) {
  require(a.size() == market.size(), errc::dimension_mismatch,
          "attraction size does not match market");
  return weighted_quality_ratio(market.visibility, a.a, market.quality, ranking);
}

double one_step_expected_downloads(const Market& market, const AttractionVector& a,
                                   std::span<const int> sigma_position_of,
                                   std::span<const int> sigma_next_position_of) {
  require(market.influence == Transform::identity, errc::unsupported_transform,
          "one-step expectation is defined for the identity influence transform only");
  const int n = market.size();
  require(a.size() == n, errc::dimension_mismatch, "attraction size does not match market");
  require(static_cast<int>(sigma_position_of.size()) == n &&
              static_cast<int>(sigma_next_position_of.size()) == n,
          errc::dimension_mismatch, "ranking size does not match market");

  const auto& v = market.visibility;
  const auto& q = market.quality;

  double den_now = 0.0;
  double num_now = 0.0;
  double den_next = 0.0;
  double num_next = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const double w_now = v[static_cast<std::size_t>(sigma_position_of[si])] * a.a[si];
    den_now += w_now;
    num_now += w_now * q[si];
    const double w_next = v[static_cast<std::size_t>(sigma_next_position_of[si])] * a.a[si];
    den_next += w_next;
    num_next += w_next * q[si];
  }
  require(den_now > 0.0 && den_next > 0.0, errc::degenerate_market, "zero total sampling weight");

  const double expected_now = num_now / den_now;

  // Download branches: song j gains one download, shifting the next-step
  // sums by v_{sigma'_j} in the denominator and v_{sigma'_j} q_j on top.
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    const double vj_next = v[static_cast<std::size_t>(sigma_next_position_of[sj])];
    const double p_download =
        v[static_cast<std::size_t>(sigma_position_of[sj])] * a.a[sj] * q[sj] / den_now;
    value += p_download * (num_next + vj_next * q[sj]) / (den_next + vj_next);
  }
  value += (1.0 - expected_now) * expected_now;
  return value;
}

double one_step_expected_downloads(const Market& market, const AttractionVector& a,
                                   const Ranking& sigma, const Ranking& sigma_next) {
  return one_step_expected_downloads(market, a, sigma.positions(), sigma_next.positions());
}

}  // namespace musiclab
