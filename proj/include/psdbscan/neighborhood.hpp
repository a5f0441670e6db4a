#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psdbscan/dataset.hpp"
#include "psdbscan/types.hpp"

namespace psdbscan {

enum class GraphSource { computed, linkage };

/// Per-point eps-neighborhoods in compressed sparse row form. Every list is
/// sorted, duplicate free, contains the point itself, and the relation is
/// symmetric.
class NeighborGraph {
 public:
  NeighborGraph() = default;

  /// Builds from per-point lists that already satisfy the invariants above.
  /// Throws InputError when they do not.
  static NeighborGraph from_lists(const std::vector<std::vector<PointId>>& lists,
                                  GraphSource source, std::optional<double> eps = std::nullopt);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_entries() const noexcept { return ids_.size(); }

  std::span<const PointId> neighbors(PointId p) const {
    return {ids_.data() + offsets_[p], ids_.data() + offsets_[p + 1]};
  }
  std::size_t degree(PointId p) const { return offsets_[p + 1] - offsets_[p]; }

  GraphSource source() const noexcept { return source_; }
  /// Radius the graph was computed with; empty for linkage input.
  std::optional<double> eps() const noexcept { return eps_; }

  std::vector<std::vector<PointId>> to_lists() const;

  /// Equality on adjacency only; provenance is ignored.
  friend bool operator==(const NeighborGraph& a, const NeighborGraph& b) {
    return a.offsets_ == b.offsets_ && a.ids_ == b.ids_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<PointId> ids_;
  GraphSource source_ = GraphSource::computed;
  std::optional<double> eps_;

  friend NeighborGraph assemble_graph(std::vector<std::vector<PointId>>&&, GraphSource,
                                      std::optional<double>);
};

/// Exact brute-force radius query: every q with |p - q| <= eps, ascending,
/// including p itself.
std::vector<PointId> query_radius(const Dataset& dataset, PointId p, double eps);

/// Uniform grid with cell side eps. A query scans the cells overlapping
/// [x - eps, x + eps] in every dimension (the 3^d block around the point's
/// cell, widened by a few ulps at cell boundaries) and filters with the same
/// distance test as query_radius, so results are identical.
class GridIndex {
 public:
  GridIndex(const Dataset& dataset, double eps);

  std::vector<PointId> query(PointId p) const;
  void query_into(PointId p, std::vector<PointId>& out) const;

  const Dataset& dataset() const noexcept { return *dataset_; }
  double eps() const noexcept { return eps_; }
  std::size_t num_cells() const noexcept { return cell_offsets_.empty() ? 0 : cell_offsets_.size() - 1; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
  };

  std::int64_t cell_coord(double x) const;

  const Dataset* dataset_;
  double eps_;
  std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> cells_;
  std::vector<std::size_t> cell_offsets_;
  std::vector<PointId> cell_points_;
};

enum class NeighborSearch {
  brute_force,    // serial O(N^2) reference
  grid,           // serial grid queries
  grid_parallel,  // grid queries distributed over OpenMP threads
};

/// adjacency[p] == query_radius(dataset, p, eps) for every p, whichever
/// search is selected.
NeighborGraph build_neighbor_graph(const Dataset& dataset, double eps,
                                   NeighborSearch search = NeighborSearch::grid_parallel);

/// Symmetric closure of the edge list plus self loops; duplicates and
/// orientation flips collapse. Throws InputError for ids >= n.
NeighborGraph ingest_linkage(std::span<const std::pair<PointId, PointId>> edges, std::size_t n);

}  // namespace psdbscan
