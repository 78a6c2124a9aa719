#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace musiclab {

// Positive nondecreasing transform applied to download counts before they
// enter the attraction term. identity is the original model.
enum class Transform { identity, log1p, sqrt };

double apply_transform(Transform f, double downloads);
const char* transform_name(Transform f);
Transform transform_from_name(std::string_view name);

// Whether participants see download counts (social influence) or not.
enum class Condition { social_influence, independent };

const char* condition_name(Condition c);
Condition condition_from_name(std::string_view name);

// Fixed per-song and per-position parameters of one market instance.
//   appeal[i]      A_i >= 0, at least one positive
//   quality[i]     q_i in [0,1], probability of download given a sampling
//   visibility[p]  v_p > 0, weight of playlist position p
//   alpha          > 0, scaling of appeal against accumulated downloads
struct Market {
  std::vector<double> appeal;
  std::vector<double> quality;
  std::vector<double> visibility;
  double alpha = 1.0;
  Transform influence = Transform::identity;

  int size() const { return static_cast<int>(appeal.size()); }

  static Market create(std::vector<double> appeal, std::vector<double> quality,
                       std::vector<double> visibility, double alpha = 1.0,
                       Transform influence = Transform::identity);
  void validate() const;
};

// Markov-chain state of a run: per-song download and sampling counters.
struct MarketState {
  std::vector<std::int64_t> downloads;
  std::vector<std::int64_t> samples;
  std::int64_t step = 0;

  static MarketState zeros(int n);
  void validate(int n) const;
};

}  // namespace musiclab
