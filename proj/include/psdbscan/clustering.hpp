#pragma once

#include <cstddef>
#include <vector>

#include "psdbscan/neighborhood.hpp"
#include "psdbscan/point_bitset.hpp"
#include "psdbscan/types.hpp"

namespace psdbscan {

/// Final clustering in canonical form: every clustered point carries the
/// maximum core id of its cluster, everything else is kNoise.
struct ClusteringResult {
  std::vector<Label> labels;
  std::size_t num_clusters = 0;
  CoreRecord core_flags;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_noise() const;

  friend bool operator==(const ClusteringResult&, const ClusteringResult&) = default;
};

/// Reference DBSCAN. Cores are points with |N_eps(p)| >= min_points (self
/// counted); cores merge only through core-core adjacency; a border point
/// joins the adjacent core cluster with the largest canonical label.
/// Throws InputError if min_points < 1.
ClusteringResult sequential_dbscan(const NeighborGraph& graph, std::size_t min_points);

/// Builds a ClusteringResult from labels that already hold final cluster
/// roots for every non-noise point.
ClusteringResult make_result(std::vector<Label> labels, CoreRecord core_flags);

}  // namespace psdbscan
