#include "psdbscan/datagen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "psdbscan/neighborhood.hpp"
#include "psdbscan/ps_engine.hpp"

namespace psdbscan {

Dataset gen_blobs(std::size_t num_points, std::size_t dim, std::size_t num_clusters, double spread,
                  std::uint64_t seed) {
  if (num_clusters < 1 || num_points < num_clusters) {
    throw InputError("gen_blobs requires num_points >= num_clusters >= 1");
  }
  if (dim < 1) throw InputError("gen_blobs requires dim >= 1");
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw InputError("spread must be finite and >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double min_sep = 8.0 * spread;

  std::vector<double> centers;
  centers.reserve(num_clusters * dim);
  std::vector<double> candidate(dim);
  for (std::size_t c = 0; c < num_clusters; ++c) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      for (auto& x : candidate) x = unit(rng);
      bool ok = true;
      for (std::size_t o = 0; o < c && ok; ++o) {
        const std::span<const double> other(centers.data() + o * dim, dim);
        ok = squared_distance(candidate, other) >= min_sep * min_sep;
      }
      if (ok) break;
    }
    centers.insert(centers.end(), candidate.begin(), candidate.end());
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> coords(num_points * dim);
  for (std::size_t i = 0; i < num_points; ++i) {
    const std::size_t c = i % num_clusters;
    for (std::size_t k = 0; k < dim; ++k) coords[i * dim + k] = centers[c * dim + k] + spread * noise(rng);
  }
  return Dataset(dim, std::move(coords));
}

double mean_degree(const Dataset& dataset, double eps) {
  if (dataset.empty()) return 0.0;
  const auto graph = build_neighbor_graph(dataset, eps);
  return static_cast<double>(graph.num_entries() - graph.size()) / static_cast<double>(graph.size());
}

GeneratedData gen_with_target_degree(std::size_t num_points, double target_avg_degree, std::uint64_t seed) {
  if (!(target_avg_degree >= 1.0) || target_avg_degree >= static_cast<double>(num_points)) {
    throw InputError("target degree must lie in [1, num_points)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> coords(num_points * 2);
  for (auto& x : coords) x = unit(rng);
  GeneratedData out{Dataset(2, std::move(coords)), 0.0, 0.0, {}};

  // Mean degree is nondecreasing in eps; every point pair lies within
  // sqrt(2) of each other in the unit square.
  double lo = 0.0;
  double hi = std::sqrt(2.0);
  bool bracketed = false;  // hi not yet measured; bisecting toward sqrt(2) would build an N^2 graph
  double best_eps = hi;
  double best_degree = static_cast<double>(num_points - 1);
  double eps = std::min(hi, std::sqrt(target_avg_degree / (M_PI * static_cast<double>(num_points))));
  for (int iter = 0; iter < 60; ++iter) {
    const double degree = mean_degree(out.dataset, eps);
    if (std::fabs(degree - target_avg_degree) < std::fabs(best_degree - target_avg_degree)) {
      best_eps = eps;
      best_degree = degree;
    }
    if (std::fabs(degree - target_avg_degree) <= 0.01 * target_avg_degree) break;
    if (degree < target_avg_degree) {
      lo = eps;
    } else {
      hi = eps;
      bracketed = true;
    }
    eps = bracketed ? 0.5 * (lo + hi) : std::min(hi, 1.25 * eps);
  }
  if (std::fabs(best_degree - target_avg_degree) > 0.2 * target_avg_degree) {
    throw InputError("could not reach target degree " + std::to_string(target_avg_degree) +
                     " (closest " + std::to_string(best_degree) + ")");
  }
  out.eps = best_eps;
  out.mean_degree = best_degree;
  return out;
}

GeneratedData gen_chain(std::size_t num_points, std::size_t num_workers_to_span, std::uint64_t seed,
                        std::size_t segment_length) {
  if (num_workers_to_span < 1 || num_points < num_workers_to_span) {
    throw InputError("gen_chain requires num_points >= num_workers_to_span >= 1");
  }
  if (segment_length < 1) throw InputError("gen_chain requires segment_length >= 1");
  auto blocks = partition_points(num_points, num_workers_to_span, 0, PartitionStrategy::contiguous);

  // Walk the path handing out ids segment by segment, cycling through the
  // contiguous blocks, so consecutive segments belong to different workers.
  std::vector<std::size_t> position(num_points);
  std::vector<std::size_t> next(blocks.size(), 0);
  std::size_t placed = 0;
  while (placed < num_points) {
    for (std::size_t w = 0; w < blocks.size(); ++w) {
      for (std::size_t k = 0; k < segment_length && next[w] < blocks[w].size(); ++k) {
        position[blocks[w][next[w]++]] = placed++;
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<double> offsets(2 * num_points);
  for (auto& o : offsets) o = jitter(rng);
  std::vector<double> coords(num_points * 2);
  for (std::size_t id = 0; id < num_points; ++id) {
    const std::size_t k = position[id];
    coords[2 * id] = static_cast<double>(k) + offsets[2 * k];
    coords[2 * id + 1] = offsets[2 * k + 1];
  }
  // Path neighbors lie within sqrt(1.2^2 + 0.2^2) < 1.5 of each other,
  // points two steps apart at least 1.8 > 1.5.
  GeneratedData out{Dataset(2, std::move(coords)), 1.5, 0.0, std::move(blocks)};
  out.mean_degree = num_points > 1 ? 2.0 * static_cast<double>(num_points - 1) / static_cast<double>(num_points) : 0.0;
  return out;
}

}  // namespace psdbscan
