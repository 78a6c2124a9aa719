#include "lfap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "assignment.hpp"
#include "errors.hpp"

namespace musiclab::lfap {

namespace {

void check_vectors(std::span<const double> a, std::span<const double> q,
                   std::span<const double> v) {
  const std::size_t n = a.size();
  require(n >= 1, errc::invalid_argument, "empty instance");
  require(q.size() == n && v.size() == n, errc::dimension_mismatch,
          "a, q, v must have equal length");
  bool any_positive = false;
  for (double ai : a) {
    require(ai >= 0.0 && std::isfinite(ai), errc::invalid_argument, "attraction must be >= 0");
    any_positive = any_positive || ai > 0.0;
  }
  require(any_positive, errc::degenerate_market, "all attractions are zero");
  for (double vp : v)
    require(vp > 0.0 && std::isfinite(vp), errc::invalid_argument, "visibility must be > 0");
}

double matching_ratio(const LfapInstance& inst, const std::vector<int>& matching) {
  double c = 0.0;
  double d = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    c += inst.cost_at(i, matching[static_cast<std::size_t>(i)]);
    d += inst.weight_at(i, matching[static_cast<std::size_t>(i)]);
  }
  return c / d;
}

// The optimal ratio lies in [min q, max q]; rounding can push the computed
// value a few ulps outside, which would turn exact key ties (e.g. constant
// quality) into noise-ordered sorts. Clamping restores the exact ties.
double clamp_to_quality_range(std::span<const double> q, double lambda) {
  const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
  return std::clamp(lambda, *lo, *hi);
}

}  // namespace

LfapInstance LfapInstance::create(int n, std::vector<double> cost, std::vector<double> weight) {
  require(n >= 1, errc::invalid_argument, "instance size must be positive");
  const auto expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  require(cost.size() == expected && weight.size() == expected, errc::dimension_mismatch,
          "cost/weight must be square matrices of matching size");
  for (double w : weight)
    require(w > 0.0 && std::isfinite(w), errc::invalid_argument, "weights must be > 0");
  for (double c : cost)
    require(std::isfinite(c), errc::invalid_argument, "costs must be finite");
  LfapInstance inst;
  inst.n = n;
  inst.cost = std::move(cost);
  inst.weight = std::move(weight);
  return inst;
}

LfapSolution solve_lfap_dinkelbach(const LfapInstance& inst, const AssignmentSolver& oracle) {
  const int n = inst.n;
  const AssignmentSolver solver =
      oracle ? oracle
             : AssignmentSolver([](int m, std::span<const double> c) {
                 return min_cost_assignment(m, c);
               });

  std::vector<int> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), 0);

  LfapSolution best;
  best.matching = identity;
  best.objective = matching_ratio(inst, identity);
  double lambda = best.objective;
  best.lambda_trace.push_back(lambda);

  std::vector<double> reduced(inst.cost.size());
  const int max_iterations = n + 2;
  for (int iter = 0; iter < max_iterations; ++iter) {
    for (std::size_t k = 0; k < reduced.size(); ++k)
      reduced[k] = inst.cost[k] - lambda * inst.weight[k];
    const std::vector<int> matching = solver(n, reduced);
    require(static_cast<int>(matching.size()) == n, errc::invalid_argument,
            "assignment oracle returned wrong size");

    double reduced_value = 0.0;
    for (int i = 0; i < n; ++i)
      reduced_value += reduced[static_cast<std::size_t>(i) * n +
                               static_cast<std::size_t>(matching[static_cast<std::size_t>(i)])];
    const double ratio = matching_ratio(inst, matching);
    if (ratio < best.objective) {
      best.matching = matching;
      best.objective = ratio;
    }
    if (reduced_value >= -kConvergenceTol) return best;   // f(lambda) ~ 0: lambda optimal
    if (ratio >= lambda - kConvergenceTol) return best;   // no measurable progress
    lambda = ratio;
    best.lambda_trace.push_back(lambda);
  }
  fail(errc::no_convergence, "Dinkelbach iteration exceeded its n+2 cap");
}

double ranking_objective(std::span<const double> a, std::span<const double> q,
                         std::span<const double> v, const Ranking& ranking) {
  return weighted_quality_ratio(v, a, q, ranking);
}

namespace {

// Ties break toward the lower index so results are deterministic.
void sort_descending_with_index_ties(std::vector<int>& order, const double* value) {
  std::sort(order.begin(), order.end(), [value](int lhs, int rhs) {
    const double vl = value[lhs];
    const double vr = value[rhs];
    if (vl != vr) return vl > vr;
    return lhs < rhs;
  });
}

std::vector<int> positions_by_visibility(std::span<const double> v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  sort_descending_with_index_ties(order, v.data());
  return order;
}

}  // namespace

Ranking rearrangement_ranking(std::span<const double> a, std::span<const double> q,
                              std::span<const double> v, double lambda) {
  check_vectors(a, q, v);
  const int n = static_cast<int>(a.size());
  std::vector<double> key(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    key[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i)] * (q[static_cast<std::size_t>(i)] - lambda);

  std::vector<int> song_order(static_cast<std::size_t>(n));
  std::iota(song_order.begin(), song_order.end(), 0);
  sort_descending_with_index_ties(song_order, key.data());
  const std::vector<int> pos_order = positions_by_visibility(v);

  std::vector<int> position_of(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    position_of[static_cast<std::size_t>(song_order[static_cast<std::size_t>(k)])] =
        pos_order[static_cast<std::size_t>(k)];
  return Ranking::from_position_of(std::move(position_of));
}

ParametricPoint parametric_value(std::span<const double> a, std::span<const double> q,
                                 std::span<const double> v, double lambda) {
  ParametricPoint out;
  out.playlist = rearrangement_ranking(a, q, v, lambda);
  double value = 0.0;
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    value += v[static_cast<std::size_t>(out.playlist.position_of(i))] * a[si] * (q[si] - lambda);
  }
  out.value = value;
  return out;
}

ParametricSolver::ParametricSolver(std::vector<double> visibility) : v_(std::move(visibility)) {
  require(!v_.empty(), errc::invalid_argument, "empty visibility");
  for (double vp : v_)
    require(vp > 0.0 && std::isfinite(vp), errc::invalid_argument, "visibility must be > 0");
  pos_order_ = positions_by_visibility(v_);
  key_.resize(v_.size());
  song_order_.resize(v_.size());
  std::iota(song_order_.begin(), song_order_.end(), 0);
  position_of_.resize(v_.size());
}

void ParametricSolver::rearrange(std::span<const double> a, std::span<const double> q,
                                 double lambda) {
  const int n = static_cast<int>(v_.size());
  for (int i = 0; i < n; ++i)
    key_[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i)] * (q[static_cast<std::size_t>(i)] - lambda);
  sort_descending_with_index_ties(song_order_, key_.data());
  for (int k = 0; k < n; ++k)
    position_of_[static_cast<std::size_t>(song_order_[static_cast<std::size_t>(k)])] =
        pos_order_[static_cast<std::size_t>(k)];
}

double ParametricSolver::playlist_ratio(std::span<const double> a,
                                        std::span<const double> q) const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const double w = v_[static_cast<std::size_t>(position_of_[i])] * a[i];
    num += w * q[i];
    den += w;
  }
  require(den > 0.0, errc::degenerate_market, "zero total sampling weight");
  return num / den;
}

PerformanceSolution ParametricSolver::solve(std::span<const double> a,
                                            std::span<const double> q) {
  check_vectors(a, q, v_);

  PerformanceSolution out;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const double w = v_[i] * a[i];  // identity playlist seeds the iteration
    num += w * q[i];
    den += w;
  }
  require(den > 0.0, errc::degenerate_market, "zero total sampling weight");
  double lambda = num / den;
  out.lambda_trace.push_back(lambda);

  const int max_iterations = static_cast<int>(v_.size()) + 2;
  for (int iter = 0; iter < max_iterations; ++iter) {
    rearrange(a, q, lambda);
    double f = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i)
      f += v_[static_cast<std::size_t>(position_of_[i])] * key_[i];
    const double next = playlist_ratio(a, q);
    if (std::abs(f) <= kConvergenceTol || next <= lambda + kConvergenceTol * 1e-3) {
      rearrange(a, q, clamp_to_quality_range(q, next));
      out.ranking = Ranking::from_position_of(position_of_);
      out.objective = playlist_ratio(a, q);
      return out;
    }
    lambda = next;
    out.lambda_trace.push_back(lambda);
  }
  fail(errc::no_convergence, "Dinkelbach iteration exceeded its n+2 cap");
}

PerformanceSolution solve_performance_parametric(std::span<const double> a,
                                                 std::span<const double> q,
                                                 std::span<const double> v) {
  ParametricSolver solver(std::vector<double>(v.begin(), v.end()));
  return solver.solve(a, q);
}

Ranking performance_ranking(const Market& market, const AttractionVector& attr,
                            std::span<const double> q) {
  const int n = market.size();
  require(attr.size() == n, errc::dimension_mismatch, "attraction size does not match market");
  require(static_cast<int>(q.size()) == n, errc::dimension_mismatch,
          "quality size does not match market");
  check_vectors(attr.a, q, market.visibility);

  const bool all_positive =
      std::all_of(attr.a.begin(), attr.a.end(), [](double x) { return x > 0.0; });

  double optimal;
  if (all_positive) {
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    std::vector<double> weight(cost.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto k = static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j);
        const double w = market.visibility[static_cast<std::size_t>(j)] *
                         attr.a[static_cast<std::size_t>(i)];
        weight[k] = w;
        cost[k] = -w * q[static_cast<std::size_t>(i)];
      }
    }
    const LfapSolution sol =
        solve_lfap_dinkelbach(LfapInstance::create(n, std::move(cost), std::move(weight)));
    optimal = -sol.objective;
  } else {
    // Songs with zero attraction contribute nothing to either sum, which
    // puts the instance outside the LFAP's positive-weight contract; the
    // parametric route solves it exactly.
    optimal = solve_performance_parametric(attr.a, q, market.visibility).objective;
  }
  return rearrangement_ranking(attr.a, q, market.visibility,
                               clamp_to_quality_range(q, optimal));
}

Ranking brute_force_ranking(int n, const std::function<double(const Ranking&)>& objective) {
  require(n >= 1 && n <= 10, errc::size_guard, "brute force is guarded at n <= 10");
  std::vector<int> position_of(static_cast<std::size_t>(n));
  std::iota(position_of.begin(), position_of.end(), 0);

  Ranking best;
  double best_value = -std::numeric_limits<double>::infinity();
  do {
    Ranking candidate = Ranking::from_position_of(position_of);
    const double value = objective(candidate);
    if (value > best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  } while (std::next_permutation(position_of.begin(), position_of.end()));
  return best;
}

Ranking brute_force_performance_ranking(std::span<const double> a, std::span<const double> q,
                                        std::span<const double> v) {
  check_vectors(a, q, v);
  return brute_force_ranking(static_cast<int>(a.size()), [&](const Ranking& r) {
    return ranking_objective(a, q, v, r);
  });
}

}  // namespace musiclab::lfap
