#include "psdbscan/clustering.hpp"

#include <algorithm>

#include "psdbscan/disjoint_set.hpp"

namespace psdbscan {

std::size_t ClusteringResult::num_noise() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

ClusteringResult make_result(std::vector<Label> labels, CoreRecord core_flags) {
  ClusteringResult result;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (core_flags.test(static_cast<PointId>(p)) && labels[p] == p) ++result.num_clusters;
  }
  result.labels = std::move(labels);
  result.core_flags = std::move(core_flags);
  return result;
}

ClusteringResult sequential_dbscan(const NeighborGraph& graph, std::size_t min_points) {
  if (min_points < 1) throw InputError("min_points must be at least 1");
  const std::size_t n = graph.size();

  CoreRecord core(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (graph.degree(static_cast<PointId>(p)) >= min_points) core.set(static_cast<PointId>(p));
  }

  DisjointSet clusters(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto pid = static_cast<PointId>(p);
    if (!core.test(pid)) continue;
    for (PointId q : graph.neighbors(pid)) {
      if (core.test(q)) clusters.unite(pid, q);
    }
  }

  std::vector<Label> labels(n, kNoise);
  for (std::size_t p = 0; p < n; ++p) {
    const auto pid = static_cast<PointId>(p);
    if (core.test(pid)) {
      labels[p] = clusters.find(pid);
      continue;
    }
    for (PointId q : graph.neighbors(pid)) {
      if (!core.test(q)) continue;
      const Label root = clusters.find(q);
      if (labels[p] == kNoise || root > labels[p]) labels[p] = root;
    }
  }
  return make_result(std::move(labels), std::move(core));
}

}  // namespace psdbscan
