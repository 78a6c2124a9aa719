#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace musiclab {

// A playlist permutation together with its inverse. position_of maps a song
// to the playlist position it occupies; song_at maps a position back to the
// song. Both sides are 0-based and kept consistent by construction.
class Ranking {
public:
  Ranking() = default;

  static Ranking identity(int n);
  static Ranking from_position_of(std::vector<int> position_of);
  static Ranking from_song_at(std::vector<int> song_at);

  int size() const { return static_cast<int>(position_of_.size()); }
  int position_of(int song) const { return position_of_[static_cast<std::size_t>(song)]; }
  int song_at(int position) const { return song_at_[static_cast<std::size_t>(position)]; }

  std::span<const int> positions() const { return position_of_; }
  std::span<const int> songs() const { return song_at_; }

  // Stable FNV-1a digest of position_of; used as the per-snapshot trace tag.
  std::uint64_t hash() const;

  bool operator==(const Ranking&) const = default;

private:
  std::vector<int> position_of_;
  std::vector<int> song_at_;
};

std::uint64_t permutation_hash(std::span<const int> position_of);

}  // namespace musiclab
