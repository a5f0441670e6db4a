#include "psdbscan/dataset.hpp"

#include <cmath>
#include <string>

namespace psdbscan {

Dataset::Dataset(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InputError("dataset dimension must be at least 1");
  if (coords_.size() % dim_ != 0) {
    throw InputError("coordinate count " + std::to_string(coords_.size()) +
                     " is not a multiple of dimension " + std::to_string(dim_));
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw InputError("non-finite coordinate for point " + std::to_string(i / dim_));
    }
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace psdbscan
