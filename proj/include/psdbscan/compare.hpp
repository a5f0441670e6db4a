#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "psdbscan/neighborhood.hpp"
#include "psdbscan/ps_engine.hpp"

namespace psdbscan {

/// One row of the communication comparison between the peer-to-peer
/// baseline and the parameter-server engine on the same graph and
/// partition.
struct ComparisonRow {
  std::string dataset;
  std::size_t workers = 0;
  std::size_t p2p_messages = 0;
  std::size_t ps_entries = 0;
  /// p2p_messages / ps_entries; 0 when the PS engine pushed nothing.
  double speedup = 0.0;
  std::size_t ps_rounds = 0;
  std::size_t p2p_rounds = 0;
  std::size_t monotonicity_violations = 0;
  /// Both engines reproduced the sequential result exactly.
  bool matches_oracle = false;
};

ComparisonRow compare_engines(const std::string& dataset, const NeighborGraph& graph, std::size_t min_points,
                              std::size_t workers, std::uint64_t seed, PartitionStrategy partition);

}  // namespace psdbscan
