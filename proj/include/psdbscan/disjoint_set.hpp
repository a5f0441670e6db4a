#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psdbscan/types.hpp"

namespace psdbscan {

/// Union-find with path compression where the larger root always wins a
/// union. Consequently the root of every class is its maximum id, which is
/// the same value the max-label protocol converges to.
class DisjointSet {
 public:
  DisjointSet() = default;
  explicit DisjointSet(std::size_t size);

  std::size_t size() const noexcept { return parent_.size(); }

  /// Root of x's class; compresses the traversed path.
  PointId find(PointId x);

  /// Merges the classes of x and y.
  void unite(PointId x, PointId y);

  bool same(PointId x, PointId y) { return find(x) == find(y); }

  /// Raw parent pointer, for inspecting compression.
  PointId parent(PointId x) const;

  std::span<const PointId> parents() const noexcept { return parent_; }

 private:
  void check(PointId x) const;

  std::vector<PointId> parent_;
};

}  // namespace psdbscan
