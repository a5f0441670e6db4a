#pragma once

#include <cstddef>
#include <vector>

namespace psdbscan {

struct RoundMetrics {
  std::size_t round = 0;
  std::size_t entries_pushed = 0;
  std::size_t entries_pulled = 0;
  /// Server entries whose value changed in this round's reduce.
  std::size_t labels_changed = 0;

  friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

/// Communication accounting for one clustering run.
///
/// For the parameter-server engine, `entries_pushed` counts sparse
/// (index, label) pairs sent to the server and `entries_pulled` counts label
/// entries received by full-vector pulls. Core/noise record exchanges are
/// counted separately in 64-bit words. For the peer-to-peer baseline,
/// `entries_pushed` counts every merge-request message including forwards.
struct CommMetrics {
  std::size_t rounds = 0;
  std::size_t entries_pushed = 0;
  std::size_t entries_pulled = 0;
  std::size_t bitset_words_pushed = 0;
  std::size_t bitset_words_pulled = 0;
  /// Per-worker finished flags plus the broadcast verdict.
  std::size_t control_messages = 0;
  std::size_t monotonicity_violations = 0;
  std::vector<RoundMetrics> per_round;

  /// Every transferred entry or word modeled as 8 bytes.
  std::size_t modeled_bytes() const noexcept {
    return 8 * (entries_pushed + entries_pulled + bitset_words_pushed + bitset_words_pulled);
  }

  friend bool operator==(const CommMetrics&, const CommMetrics&) = default;
};

}  // namespace psdbscan
