#pragma once

#include <cstdint>
#include <vector>

namespace musiclab {

// Position visibility: power-law decay over the top of the playlist with a
// linear up-tick across the last few positions, mirroring the single-column
// layout where the bottom of the list regains some attention.
struct VisibilityParams {
  double gamma = 0.8;        // decay exponent, > 0
  int uptick_len = 5;        // number of trailing positions in the up-tick
  double uptick_ratio = 1.2; // final position rises to this multiple of the minimum
};

std::vector<double> visibility_profile(int n, const VisibilityParams& params = {});

struct QualityAppeal {
  std::vector<double> appeal;
  std::vector<double> quality;
};

// Independent Gaussian setting: two independent standard-normal vectors,
// each min-max normalized to [0,1]. Appeal is drawn first.
QualityAppeal gaussian_setting(int n, std::uint64_t seed);

// Negatively correlated setting: quality as above, appeal mirrored as 1-q
// plus Gaussian jitter, clamped and re-normalized to touch 0 and 1.
QualityAppeal negative_correlation_setting(int n, std::uint64_t seed, double jitter_sd = 0.05);

}  // namespace musiclab
