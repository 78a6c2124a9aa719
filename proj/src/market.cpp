#include "market.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace musiclab {

double apply_transform(Transform f, double downloads) {
  switch (f) {
    case Transform::identity: return downloads;
    case Transform::log1p: return std::log1p(downloads);
    case Transform::sqrt: return std::sqrt(downloads);
  }
  fail(errc::unsupported_transform, "unknown influence transform");
}

const char* transform_name(Transform f) {
  switch (f) {
    case Transform::identity: return "identity";
    case Transform::log1p: return "log1p";
    case Transform::sqrt: return "sqrt";
  }
  return "?";
}

Transform transform_from_name(std::string_view name) {
  if (name == "identity") return Transform::identity;
  if (name == "log1p") return Transform::log1p;
  if (name == "sqrt") return Transform::sqrt;
  fail(errc::unsupported_transform, "unknown influence transform: " + std::string(name));
}

const char* condition_name(Condition c) {
  return c == Condition::social_influence ? "si" : "in";
}

Condition condition_from_name(std::string_view name) {
  if (name == "si") return Condition::social_influence;
  if (name == "in") return Condition::independent;
  fail(errc::invalid_argument, "unknown condition: " + std::string(name) + " (expected si|in)");
}

Market Market::create(std::vector<double> appeal, std::vector<double> quality,
                      std::vector<double> visibility, double alpha, Transform influence) {
  Market m;
  m.appeal = std::move(appeal);
  m.quality = std::move(quality);
  m.visibility = std::move(visibility);
  m.alpha = alpha;
  m.influence = influence;
  m.validate();
  return m;
}

void Market::validate() const {
  const std::size_t n = appeal.size();
  require(n >= 1, errc::invalid_argument, "market needs at least one song");
  require(quality.size() == n, errc::dimension_mismatch, "quality size != appeal size");
  require(visibility.size() == n, errc::dimension_mismatch, "visibility size != appeal size");
  require(alpha > 0.0 && std::isfinite(alpha), errc::invalid_argument, "alpha must be > 0");

  bool any_positive_appeal = false;
  for (double a : appeal) {
    require(a >= 0.0 && std::isfinite(a), errc::invalid_argument, "appeal must be >= 0");
    any_positive_appeal = any_positive_appeal || a > 0.0;
  }
  require(any_positive_appeal, errc::degenerate_market, "all appeal values are zero");
  for (double q : quality)
    require(q >= 0.0 && q <= 1.0, errc::invalid_argument, "quality must lie in [0,1]");
  for (double v : visibility)
    require(v > 0.0 && std::isfinite(v), errc::invalid_argument, "visibility must be > 0");
}

MarketState MarketState::zeros(int n) {
  require(n >= 1, errc::invalid_argument, "state needs at least one song");
  MarketState s;
  s.downloads.assign(static_cast<std::size_t>(n), 0);
  s.samples.assign(static_cast<std::size_t>(n), 0);
  s.step = 0;
  return s;
}

void MarketState::validate(int n) const {
  require(static_cast<int>(downloads.size()) == n, errc::dimension_mismatch,
          "downloads size does not match market");
  require(static_cast<int>(samples.size()) == n, errc::dimension_mismatch,
          "samples size does not match market");
  require(step >= 0, errc::state_corruption, "negative step");
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    require(downloads[si] >= 0 && samples[si] >= 0, errc::state_corruption,
            "negative counter in state");
    require(downloads[si] <= samples[si], errc::state_corruption,
            "song " + std::to_string(i + 1) + " has more downloads than samplings");
  }
}

}  // namespace musiclab
