#include "psdbscan/disjoint_set.hpp"

#include <numeric>
#include <string>

namespace psdbscan {

DisjointSet::DisjointSet(std::size_t size) : parent_(size) {
  std::iota(parent_.begin(), parent_.end(), PointId{0});
}

void DisjointSet::check(PointId x) const {
  if (x >= parent_.size()) {
    throw InputError("disjoint set element " + std::to_string(x) + " out of range [0, " +
                     std::to_string(parent_.size()) + ")");
  }
}

PointId DisjointSet::find(PointId x) {
  check(x);
  PointId root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const PointId next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

void DisjointSet::unite(PointId x, PointId y) {
  const PointId rx = find(x);
  const PointId ry = find(y);
  if (rx == ry) return;
  if (rx < ry) {
    parent_[rx] = ry;
  } else {
    parent_[ry] = rx;
  }
}

PointId DisjointSet::parent(PointId x) const {
  check(x);
  return parent_[x];
}

}  // namespace psdbscan
