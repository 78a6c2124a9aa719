#include "policies.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "errors.hpp"
#include "lfap.hpp"
#include "model.hpp"

namespace musiclab {

const char* policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::download_rank: return "d-rank";
    case PolicyKind::performance_rank: return "p-rank";
    case PolicyKind::random_rank: return "rand-rank";
  }
  return "?";
}

PolicyKind policy_kind_from_name(std::string_view name) {
  if (name == "d-rank") return PolicyKind::download_rank;
  if (name == "p-rank") return PolicyKind::performance_rank;
  if (name == "rand-rank") return PolicyKind::random_rank;
  fail(errc::invalid_argument,
       "unknown policy: " + std::string(name) + " (expected d-rank|p-rank|rand-rank)");
}

const char* quality_source_name(QualitySource s) {
  return s == QualitySource::true_quality ? "true" : "estimated";
}

QualitySource quality_source_from_name(std::string_view name) {
  if (name == "true") return QualitySource::true_quality;
  if (name == "estimated") return QualitySource::estimated_quality;
  fail(errc::invalid_argument,
       "unknown quality source: " + std::string(name) + " (expected true|estimated)");
}

Ranking download_ranking(const MarketState& state) {
  const int n = static_cast<int>(state.downloads.size());
  state.validate(n);
  std::vector<int> song_order(static_cast<std::size_t>(n));
  std::iota(song_order.begin(), song_order.end(), 0);
  std::sort(song_order.begin(), song_order.end(), [&](int lhs, int rhs) {
    const auto dl = state.downloads[static_cast<std::size_t>(lhs)];
    const auto dr = state.downloads[static_cast<std::size_t>(rhs)];
    if (dl != dr) return dl > dr;
    return lhs < rhs;  // ties by song index
  });
  std::vector<int> position_of(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos)
    position_of[static_cast<std::size_t>(song_order[static_cast<std::size_t>(pos)])] = pos;
  return Ranking::from_position_of(std::move(position_of));
}

Ranking random_ranking(int n, Rng& rng) {
  require(n >= 1, errc::invalid_argument, "ranking size must be positive");
  std::vector<int> song_at(static_cast<std::size_t>(n));
  std::iota(song_at.begin(), song_at.end(), 0);
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(song_at[static_cast<std::size_t>(i)], song_at[j]);
  }
  return Ranking::from_song_at(std::move(song_at));
}

Ranking PolicyEngine::apply(const Market& market, const MarketState& state,
                            std::span<const double> q_estimated, Rng& rng) {
  switch (spec_.kind) {
    case PolicyKind::download_rank:
      return download_ranking(state);
    case PolicyKind::random_rank:
      return random_ranking(market.size(), rng);
    case PolicyKind::performance_rank: {
      // Under the independent condition with true qualities the instance
      // never changes, so the first solution is cached for the whole run.
      // With estimated qualities the instance tracks the evolving estimates
      // and must be re-solved at each refresh.
      const bool cacheable = spec_.condition == Condition::independent &&
                             spec_.quality_source == QualitySource::true_quality;
      if (cacheable && cached_independent_rank_) return *cached_independent_rank_;
      attraction_into(market, state, spec_.condition, attraction_buf_);
      const std::span<const double> q = spec_.quality_source == QualitySource::true_quality
                                            ? std::span<const double>(market.quality)
                                            : q_estimated;
      require(static_cast<int>(q.size()) == market.size(), errc::dimension_mismatch,
              "quality estimate size does not match market");
      if (!solver_) solver_.emplace(market.visibility);
      Ranking ranking = solver_->solve(attraction_buf_, q).ranking;
      if (cacheable) cached_independent_rank_ = ranking;
      return ranking;
    }
  }
  fail(errc::invalid_argument, "unknown policy kind");
}

}  // namespace musiclab
