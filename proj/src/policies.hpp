#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lfap.hpp"
#include "market.hpp"
#include "ranking.hpp"
#include "rng.hpp"

namespace musiclab {

enum class PolicyKind { download_rank, performance_rank, random_rank };
enum class QualitySource { true_quality, estimated_quality };

const char* policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from_name(std::string_view name);
const char* quality_source_name(QualitySource s);
QualitySource quality_source_from_name(std::string_view name);

// Which ranking rule is in force and under which information condition.
// quality_source only matters for the performance ranking.
struct PolicySpec {
  PolicyKind kind = PolicyKind::download_rank;
  Condition condition = Condition::social_influence;
  QualitySource quality_source = QualitySource::true_quality;
};

// Songs ordered by download count descending, ties by song index; the most
// downloaded song takes playlist position 0.
Ranking download_ranking(const MarketState& state);

// Uniform permutation via Fisher-Yates; consumes exactly n-1 draws.
Ranking random_ranking(int n, Rng& rng);

// Policy dispatch for one world. Stateful in two ways: P-rank under the
// independent condition is time-invariant and therefore solved once and
// cached for the rest of the run, and the parametric solver's scratch
// buffers persist across refreshes of the same market.
class PolicyEngine {
public:
  explicit PolicyEngine(PolicySpec spec) : spec_(spec) {}

  const PolicySpec& spec() const { return spec_; }

  Ranking apply(const Market& market, const MarketState& state,
                std::span<const double> q_estimated, Rng& rng);

private:
  PolicySpec spec_;
  std::optional<Ranking> cached_independent_rank_;
  std::optional<lfap::ParametricSolver> solver_;
  std::vector<double> attraction_buf_;
};

}  // namespace musiclab
