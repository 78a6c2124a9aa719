#include "ranking.hpp"

#include <numeric>

#include "errors.hpp"

namespace musiclab {

namespace {

std::vector<int> invert(const std::vector<int>& perm, const char* what) {
  const int n = static_cast<int>(perm.size());
  require(n >= 1, errc::invalid_argument, "ranking must have at least one entry");
  std::vector<int> inv(perm.size(), -1);
  for (int i = 0; i < n; ++i) {
    const int v = perm[static_cast<std::size_t>(i)];
    require(v >= 0 && v < n, errc::invalid_argument,
            std::string(what) + ": entry out of range");
    require(inv[static_cast<std::size_t>(v)] == -1, errc::invalid_argument,
            std::string(what) + ": not a permutation (duplicate entry)");
    inv[static_cast<std::size_t>(v)] = i;
  }
  return inv;
}

}  // namespace

Ranking Ranking::identity(int n) {
  require(n >= 1, errc::invalid_argument, "ranking size must be positive");
  Ranking r;
  r.position_of_.resize(static_cast<std::size_t>(n));
  std::iota(r.position_of_.begin(), r.position_of_.end(), 0);
  r.song_at_ = r.position_of_;
  return r;
}

Ranking Ranking::from_position_of(std::vector<int> position_of) {
  Ranking r;
  r.song_at_ = invert(position_of, "position_of");
  r.position_of_ = std::move(position_of);
  return r;
}

Ranking Ranking::from_song_at(std::vector<int> song_at) {
  Ranking r;
  r.position_of_ = invert(song_at, "song_at");
  r.song_at_ = std::move(song_at);
  return r;
}

std::uint64_t permutation_hash(std::span<const int> position_of) {
  // FNV-1a over the little-endian bytes of each position value.
  std::uint64_t h = 1469598103934665603ull;
  for (int v : position_of) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= static_cast<std::uint64_t>((static_cast<std::uint32_t>(v) >> (8 * byte)) & 0xFFu);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::uint64_t Ranking::hash() const { return permutation_hash(position_of_); }

}  // namespace musiclab
