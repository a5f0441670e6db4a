#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "psdbscan/clustering.hpp"
#include "psdbscan/dataset.hpp"
#include "psdbscan/neighborhood.hpp"

namespace testutil {

using psdbscan::Dataset;
using psdbscan::kNoise;
using psdbscan::Label;
using psdbscan::NeighborGraph;
using psdbscan::PointId;

// O(N^2) neighborhoods straight from the definition. Deliberately does not
// share within_eps with the library.
inline std::vector<std::vector<PointId>> naive_lists(const Dataset& d, double eps) {
  std::vector<std::vector<PointId>> lists(d.size());
  for (std::size_t p = 0; p < d.size(); ++p) {
    for (std::size_t q = 0; q < d.size(); ++q) {
      double s = 0;
      for (std::size_t k = 0; k < d.dim(); ++k) {
        const double t = d.coords()[p * d.dim() + k] - d.coords()[q * d.dim() + k];
        s += t * t;
      }
      if (s <= eps * eps) lists[p].push_back(static_cast<PointId>(q));
    }
  }
  return lists;
}

// Reference DBSCAN by BFS over core-core edges, independent of the DSU.
inline std::vector<Label> reference_labels(const std::vector<std::vector<PointId>>& lists, std::size_t min_points) {
  const std::size_t n = lists.size();
  std::vector<char> core(n);
  for (std::size_t p = 0; p < n; ++p) core[p] = lists[p].size() >= min_points;
  std::vector<Label> label(n, kNoise);
  std::vector<char> seen(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || seen[s]) continue;
    std::vector<PointId> comp;
    std::queue<PointId> q;
    q.push(static_cast<PointId>(s));
    seen[s] = 1;
    while (!q.empty()) {
      const PointId p = q.front();
      q.pop();
      comp.push_back(p);
      for (PointId r : lists[p]) {
        if (core[r] && !seen[r]) {
          seen[r] = 1;
          q.push(r);
        }
      }
    }
    const Label top = *std::max_element(comp.begin(), comp.end());
    for (PointId p : comp) label[p] = top;
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (core[p]) continue;
    for (PointId r : lists[p]) {
      if (core[r] && (label[p] == kNoise || label[r] > label[p])) label[p] = label[r];
    }
  }
  return label;
}

struct Instance {
  Dataset dataset;
  double eps;
  std::size_t min_points;
};

// Mixture of clumps and uniform noise, so instances have clusters, borders
// and noise in varying proportions.
inline Instance random_instance(std::mt19937_64& rng, std::size_t max_n, std::size_t dim, std::size_t min_n = 1) {
  std::uniform_int_distribution<std::size_t> size_dist(min_n, max_n);
  const std::size_t n = size_dist(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t clumps = 1 + rng() % 6;
  std::vector<double> centers(clumps * dim);
  for (auto& c : centers) c = unit(rng);
  const double spread = 0.01 + 0.08 * unit(rng);
  std::vector<double> coords(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const bool background = unit(rng) < 0.2;
    const std::size_t c = rng() % clumps;
    for (std::size_t k = 0; k < dim; ++k) {
      coords[i * dim + k] = background ? unit(rng) : centers[c * dim + k] + spread * normal(rng);
    }
  }
  // Occasionally quantize so exact ties on the eps boundary show up.
  if (rng() % 4 == 0) {
    for (auto& x : coords) x = std::round(x * 50.0) / 50.0;
  }
  const double eps = 0.01 + 0.12 * unit(rng);
  const std::size_t min_points = 1 + rng() % 8;
  return {Dataset(dim, std::move(coords)), eps, min_points};
}

inline std::vector<std::pair<PointId, PointId>> random_edges(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<std::pair<PointId, PointId>> edges;
  if (n == 0) return edges;
  for (std::size_t k = 0; k < m; ++k) {
    edges.emplace_back(static_cast<PointId>(rng() % n), static_cast<PointId>(rng() % n));
  }
  return edges;
}

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "psdbscan_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Frozen worked example: ids 0..11, three workers owning id ranges.
inline std::vector<std::pair<PointId, PointId>> worked_example_edges() {
  return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}, {5, 6},
          {6, 7}, {7, 8}, {8, 9}, {6, 9}, {9, 10}, {10, 11}};
}

inline std::vector<std::vector<PointId>> worked_example_partition() {
  return {{0, 1, 2, 3}, {4, 5, 6, 7, 8}, {9, 10, 11}};
}

}  // namespace testutil
