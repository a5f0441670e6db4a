#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psdbscan/types.hpp"

namespace psdbscan {

/// Dense d-dimensional point set. Point ids are implicit: the point at
/// position i has id i. Coordinates are stored row-major.
class Dataset {
 public:
  Dataset() = default;

  /// Throws InputError if dim == 0, coords.size() is not a multiple of dim,
  /// or any coordinate is NaN/Inf.
  Dataset(std::size_t dim, std::vector<double> coords);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(PointId id) const {
    return {coords_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }

  const std::vector<double>& coords() const noexcept { return coords_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Squared Euclidean distance.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Closed-ball membership test shared by every neighbor search path, so the
/// brute-force and grid searches compare identical floating point values.
inline bool within_eps(std::span<const double> a, std::span<const double> b, double eps) {
  return squared_distance(a, b) <= eps * eps;
}

}  // namespace psdbscan
