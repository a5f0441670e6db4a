#include "psdbscan/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

namespace psdbscan {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
T parse_integer(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

double parse_coordinate(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, "non-numeric coordinate '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) throw ParseError(line, "non-finite coordinate '" + std::string(field) + "'");
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

PointId parse_point_id(std::string_view field, std::size_t line) {
  const auto id = parse_integer<std::uint64_t>(field, line, "point id");
  if (id >= kNoise) throw ParseError(line, "point id " + std::string(field) + " too large");
  return static_cast<PointId>(id);
}

}  // namespace

Dataset parse_vector(std::istream& in) {
  struct Row {
    PointId id;
    std::size_t line;
    std::size_t offset;
  };
  std::vector<Row> rows;
  std::vector<double> raw;
  std::size_t dim = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto content = trim(text);
    if (content.empty()) continue;
    const auto fields = split_fields(content);
    if (fields.size() < 2) throw ParseError(line, "expected id followed by at least one coordinate");
    const std::size_t row_dim = fields.size() - 1;
    if (dim == 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      throw ParseError(line, "row has " + std::to_string(row_dim) + " coordinates, expected " +
                                 std::to_string(dim));
    }
    rows.push_back({parse_point_id(fields[0], line), line, raw.size()});
    for (std::size_t k = 1; k < fields.size(); ++k) raw.push_back(parse_coordinate(fields[k], line));
  }
  if (rows.empty()) return Dataset{};

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
  std::vector<double> coords;
  coords.reserve(raw.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].id == rows[i - 1].id) {
      throw ParseError(rows[i].line, "duplicate id " + std::to_string(rows[i].id));
    }
    if (rows[i].id != i) throw InputError("missing id " + std::to_string(i) + " (ids must be 0..N-1)");
    coords.insert(coords.end(), raw.begin() + static_cast<std::ptrdiff_t>(rows[i].offset),
                  raw.begin() + static_cast<std::ptrdiff_t>(rows[i].offset + dim));
  }
  return Dataset(dim, std::move(coords));
}

Dataset parse_vector_file(const std::string& path) {
  auto in = open_input(path);
  return parse_vector(in);
}

std::vector<std::pair<PointId, PointId>> parse_linkage_edges(std::istream& in) {
  std::vector<std::pair<PointId, PointId>> edges;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto content = trim(text);
    if (content.empty()) continue;
    const auto fields = split_fields(content);
    if (fields.size() != 2) throw ParseError(line, "expected src,dst");
    edges.emplace_back(parse_point_id(fields[0], line), parse_point_id(fields[1], line));
  }
  return edges;
}

NeighborGraph parse_linkage(std::istream& in, std::optional<std::size_t> n) {
  const auto edges = parse_linkage_edges(in);
  std::size_t count = 0;
  if (n) {
    count = *n;
  } else {
    for (const auto& [a, b] : edges) count = std::max<std::size_t>(count, std::max(a, b) + std::size_t{1});
  }
  return ingest_linkage(edges, count);
}

NeighborGraph parse_linkage_file(const std::string& path, std::optional<std::size_t> n) {
  auto in = open_input(path);
  return parse_linkage(in, n);
}

void write_labels(std::ostream& out, const ClusteringResult& result) {
  out << "id,label\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    out << i << ',';
    if (result.labels[i] == kNoise) out << -1;
    else out << result.labels[i];
    out << '\n';
  }
}

void write_labels(const std::string& path, const ClusteringResult& result) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_labels(out, result);
  if (!out) throw InputError("failed writing " + path);
}

std::vector<Label> read_labels(std::istream& in) {
  std::vector<Label> labels;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto content = trim(text);
    if (content.empty() || (line == 1 && content == "id,label")) continue;
    const auto fields = split_fields(content);
    if (fields.size() != 2) throw ParseError(line, "expected id,label");
    const auto id = parse_integer<std::uint64_t>(fields[0], line, "point id");
    if (id != labels.size()) throw ParseError(line, "labels out of id order");
    const auto value = parse_integer<std::int64_t>(fields[1], line, "label");
    if (value < -1 || value >= static_cast<std::int64_t>(kNoise)) throw ParseError(line, "label out of range");
    labels.push_back(value == -1 ? kNoise : static_cast<Label>(value));
  }
  return labels;
}

void write_vector(std::ostream& out, const Dataset& dataset) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << i;
    for (double x : dataset.point(static_cast<PointId>(i))) out << ',' << x;
    out << '\n';
  }
}

}  // namespace psdbscan
