#include "psdbscan/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psdbscan {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InputError("eps must be a positive finite number");
  }
}

void check_id(const Dataset& dataset, PointId p) {
  if (p >= dataset.size()) {
    throw InputError("point id " + std::to_string(p) + " out of range [0, " +
                     std::to_string(dataset.size()) + ")");
  }
}

// Relative widening of the scanned cell range; covers rounding in x / eps.
constexpr double kCellSlack = 1e-9;

}  // namespace

NeighborGraph assemble_graph(std::vector<std::vector<PointId>>&& lists, GraphSource source,
                             std::optional<double> eps) {
  NeighborGraph g;
  g.source_ = source;
  g.eps_ = eps;
  g.offsets_.resize(lists.size() + 1, 0);
  for (std::size_t p = 0; p < lists.size(); ++p) g.offsets_[p + 1] = g.offsets_[p] + lists[p].size();
  g.ids_.reserve(g.offsets_.back());
  for (auto& list : lists) {
    g.ids_.insert(g.ids_.end(), list.begin(), list.end());
    std::vector<PointId>().swap(list);
  }
  return g;
}

NeighborGraph NeighborGraph::from_lists(const std::vector<std::vector<PointId>>& lists,
                                        GraphSource source, std::optional<double> eps) {
  const std::size_t n = lists.size();
  for (std::size_t p = 0; p < n; ++p) {
    const auto& list = lists[p];
    if (!std::is_sorted(list.begin(), list.end()) ||
        std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw InputError("neighbor list of " + std::to_string(p) + " is not strictly ascending");
    }
    if (!std::binary_search(list.begin(), list.end(), static_cast<PointId>(p))) {
      throw InputError("neighbor list of " + std::to_string(p) + " does not contain the point");
    }
    for (PointId q : list) {
      if (q >= n) throw InputError("neighbor id " + std::to_string(q) + " out of range");
      if (!std::binary_search(lists[q].begin(), lists[q].end(), static_cast<PointId>(p))) {
        throw InputError("adjacency is not symmetric between " + std::to_string(p) + " and " +
                         std::to_string(q));
      }
    }
  }
  auto copy = lists;
  return assemble_graph(std::move(copy), source, eps);
}

std::vector<std::vector<PointId>> NeighborGraph::to_lists() const {
  std::vector<std::vector<PointId>> lists(size());
  for (std::size_t p = 0; p < size(); ++p) {
    auto nb = neighbors(static_cast<PointId>(p));
    lists[p].assign(nb.begin(), nb.end());
  }
  return lists;
}

std::vector<PointId> query_radius(const Dataset& dataset, PointId p, double eps) {
  check_id(dataset, p);
  check_eps(eps);
  std::vector<PointId> result;
  const auto center = dataset.point(p);
  for (std::size_t q = 0; q < dataset.size(); ++q) {
    if (within_eps(center, dataset.point(static_cast<PointId>(q)), eps)) {
      result.push_back(static_cast<PointId>(q));
    }
  }
  return result;
}

std::size_t GridIndex::KeyHash::operator()(const std::vector<std::int64_t>& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t c : key) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::int64_t GridIndex::cell_coord(double x) const {
  const double c = std::floor(x / eps_);
  // Keep well inside int64 so neighbor offsets cannot overflow.
  if (std::fabs(c) > 4.0e18) throw InputError("coordinate range too large for grid cell size");
  return static_cast<std::int64_t>(c);
}

GridIndex::GridIndex(const Dataset& dataset, double eps) : dataset_(&dataset), eps_(eps) {
  check_eps(eps);
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.dim();

  std::vector<std::size_t> cell_of(n);
  std::vector<std::size_t> counts;
  std::vector<std::int64_t> key(d);
  for (std::size_t p = 0; p < n; ++p) {
    const auto x = dataset.point(static_cast<PointId>(p));
    for (std::size_t k = 0; k < d; ++k) key[k] = cell_coord(x[k]);
    auto [it, inserted] = cells_.try_emplace(key, counts.size());
    if (inserted) counts.push_back(0);
    cell_of[p] = it->second;
    ++counts[it->second];
  }

  cell_offsets_.assign(counts.size() + 1, 0);
  for (std::size_t c = 0; c < counts.size(); ++c) cell_offsets_[c + 1] = cell_offsets_[c] + counts[c];
  cell_points_.resize(n);
  std::vector<std::size_t> fill(cell_offsets_.begin(), cell_offsets_.end() - 1);
  for (std::size_t p = 0; p < n; ++p) cell_points_[fill[cell_of[p]]++] = static_cast<PointId>(p);
}

std::vector<PointId> GridIndex::query(PointId p) const {
  std::vector<PointId> out;
  query_into(p, out);
  return out;
}

void GridIndex::query_into(PointId p, std::vector<PointId>& out) const {
  check_id(*dataset_, p);
  out.clear();
  const std::size_t d = dataset_->dim();
  const auto center = dataset_->point(p);
  const double reach = eps_ * (1.0 + kCellSlack);

  std::vector<std::int64_t> lo(d), hi(d), key(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = cell_coord(center[k] - reach);
    hi[k] = cell_coord(center[k] + reach);
  }
  key = lo;
  // Odometer walk over the block of candidate cells.
  while (true) {
    if (auto it = cells_.find(key); it != cells_.end()) {
      const std::size_t c = it->second;
      for (std::size_t i = cell_offsets_[c]; i < cell_offsets_[c + 1]; ++i) {
        const PointId q = cell_points_[i];
        if (within_eps(center, dataset_->point(q), eps_)) out.push_back(q);
      }
    }
    std::size_t k = 0;
    while (k < d && key[k] == hi[k]) {
      key[k] = lo[k];
      ++k;
    }
    if (k == d) break;
    ++key[k];
  }
  std::sort(out.begin(), out.end());
}

NeighborGraph build_neighbor_graph(const Dataset& dataset, double eps, NeighborSearch search) {
  check_eps(eps);
  const std::size_t n = dataset.size();
  std::vector<std::vector<PointId>> lists(n);

  switch (search) {
    case NeighborSearch::brute_force:
      for (std::size_t p = 0; p < n; ++p) lists[p] = query_radius(dataset, static_cast<PointId>(p), eps);
      break;
    case NeighborSearch::grid: {
      const GridIndex index(dataset, eps);
      for (std::size_t p = 0; p < n; ++p) index.query_into(static_cast<PointId>(p), lists[p]);
      break;
    }
    case NeighborSearch::grid_parallel: {
      const GridIndex index(dataset, eps);
      const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 256)
      for (std::int64_t p = 0; p < count; ++p) {
        index.query_into(static_cast<PointId>(p), lists[static_cast<std::size_t>(p)]);
      }
      break;
    }
  }
  return assemble_graph(std::move(lists), GraphSource::computed, eps);
}

NeighborGraph ingest_linkage(std::span<const std::pair<PointId, PointId>> edges, std::size_t n) {
  std::vector<std::vector<PointId>> lists(n);
  for (std::size_t p = 0; p < n; ++p) lists[p].push_back(static_cast<PointId>(p));
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InputError("linkage edge (" + std::to_string(a) + "," + std::to_string(b) +
                       ") references an id >= " + std::to_string(n));
    }
    if (a == b) continue;
    lists[a].push_back(b);
    lists[b].push_back(a);
  }
  for (auto& list : lists) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return assemble_graph(std::move(lists), GraphSource::linkage, std::nullopt);
}

}  // namespace psdbscan
