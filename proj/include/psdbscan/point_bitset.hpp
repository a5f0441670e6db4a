#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "psdbscan/types.hpp"

namespace psdbscan {

/// Fixed-length bitset over point ids. Used for the core record and the
/// noise record exchanged with the server.
class PointBitset {
 public:
  PointBitset() = default;
  explicit PointBitset(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  /// Number of 64-bit words a push or pull of this record transfers.
  std::size_t num_words() const noexcept { return words_.size(); }

  bool test(PointId i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(PointId i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  std::size_t count() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  PointBitset& operator|=(const PointBitset& other) {
    if (other.size_ != size_) throw InputError("bitset length mismatch");
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
  }

  friend bool operator==(const PointBitset&, const PointBitset&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

using CoreRecord = PointBitset;

}  // namespace psdbscan
