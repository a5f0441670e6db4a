#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psdbscan/clustering.hpp"
#include "psdbscan/dataset.hpp"
#include "psdbscan/neighborhood.hpp"

namespace psdbscan {

/// Vector input: one `id,c1,...,cd` row per point. Rows may come in any
/// order but ids must be exactly 0..N-1 and every row must have the same
/// dimension. Blank lines are ignored. Throws ParseError.
Dataset parse_vector(std::istream& in);
Dataset parse_vector_file(const std::string& path);

/// Linkage input: one `src,dst` edge per row. Without `n` the point count is
/// the largest id plus one.
std::vector<std::pair<PointId, PointId>> parse_linkage_edges(std::istream& in);
NeighborGraph parse_linkage(std::istream& in, std::optional<std::size_t> n);
NeighborGraph parse_linkage_file(const std::string& path, std::optional<std::size_t> n);

/// `id,label` header, then one row per point in id order; noise is -1.
void write_labels(std::ostream& out, const ClusteringResult& result);
void write_labels(const std::string& path, const ClusteringResult& result);

/// Inverse of write_labels (header optional).
std::vector<Label> read_labels(std::istream& in);

void write_vector(std::ostream& out, const Dataset& dataset);

}  // namespace psdbscan
