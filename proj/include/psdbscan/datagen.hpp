#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psdbscan/dataset.hpp"
#include "psdbscan/types.hpp"

namespace psdbscan {

/// A generated point cloud together with the radius it was built for.
struct GeneratedData {
  Dataset dataset;
  double eps = 0.0;
  /// Mean eps-neighborhood size with the point itself excluded.
  double mean_degree = 0.0;
  /// Contiguous owned sets that place consecutive chain segments on
  /// different workers (gen_chain only).
  std::vector<std::vector<PointId>> partition_hint;
};

/// Gaussian blobs of standard deviation `spread` around centers drawn
/// uniformly from the unit cube (rejecting centers closer than 8 * spread
/// when room allows). Point i belongs to blob i % num_clusters.
Dataset gen_blobs(std::size_t num_points, std::size_t dim, std::size_t num_clusters, double spread,
                  std::uint64_t seed);

/// Uniform points in the unit square plus the radius whose mean
/// neighborhood size (self excluded) is within 20% of the target, found by
/// bisection on eps. Throws InputError when the target is out of range or
/// cannot be met.
GeneratedData gen_with_target_degree(std::size_t num_points, double target_avg_degree, std::uint64_t seed);

/// Mean neighborhood size, self excluded.
double mean_degree(const Dataset& dataset, double eps);

/// A single path-shaped cluster: point k sits near (k, 0) with seeded
/// jitter, ids run along the path, and eps = 1.5 links each point to its
/// path neighbors only. The hint is the contiguous split over
/// num_workers_to_span workers, so every segment boundary is a cross-worker
/// edge.
GeneratedData gen_chain(std::size_t num_points, std::size_t num_workers_to_span, std::uint64_t seed,
                        std::size_t segment_length = 1);

}  // namespace psdbscan
