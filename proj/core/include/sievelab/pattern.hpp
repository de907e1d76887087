#pragma once

#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sievelab {

// Occupancy pattern of one sieve outcome: parts read left to right starting
// at the leftmost occupied box, so parts[0] > 0 and the last entry is the
// box adjacent to 1. Trailing and interior zeros are empty boxes to the
// right of the leftmost ball.
class Pattern {
 public:
  explicit Pattern(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("pattern: needs at least one part");
    if (parts_.front() <= 0)
      throw std::invalid_argument("pattern: leftmost part must be positive");
    for (const int p : parts_)
      if (p < 0) throw std::invalid_argument("pattern: parts must be nonnegative");
  }

  const std::vector<int>& parts() const { return parts_; }

  // Total number of balls.
  int total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

  // Index of the leftmost occupied box, counted from the box adjacent to 1.
  int leftmost_index() const { return static_cast<int>(parts_.size()); }

  // Occupancy of the i-th box (1-based, left to right); 0 beyond the range.
  int z(int i) const {
    if (i < 1) throw std::invalid_argument("pattern: coordinate must be >= 1");
    return i <= leftmost_index() ? parts_[static_cast<std::size_t>(i - 1)] : 0;
  }

  std::vector<int> z_prefix(int length) const {
    std::vector<int> out(static_cast<std::size_t>(length), 0);
    for (int i = 0; i < length && i < leftmost_index(); ++i)
      out[static_cast<std::size_t>(i)] = parts_[static_cast<std::size_t>(i)];
    return out;
  }

  // Number of occupied boxes.
  int occupied_count() const {
    int k = 0;
    for (const int p : parts_) k += (p > 0);
    return k;
  }

  // Number of boxes holding exactly r balls; for r = 0 only boxes to the
  // right of the leftmost ball count (the first part is positive anyway).
  int count_with(int r) const {
    int k = 0;
    for (const int p : parts_) k += (p == r);
    return k;
  }

  std::string dash() const {
    std::string out;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) out += '-';
      out += std::to_string(parts_[i]);
    }
    return out;
  }

  friend auto operator<=>(const Pattern&, const Pattern&) = default;

 private:
  std::vector<int> parts_;
};

}  // namespace sievelab
