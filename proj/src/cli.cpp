#include "psdbscan/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "psdbscan/compare.hpp"
#include "psdbscan/datagen.hpp"
#include "psdbscan/io.hpp"
#include "psdbscan/p2p_engine.hpp"
#include "psdbscan/ps_engine.hpp"

namespace psdbscan {
namespace {

using nlohmann::json;

// Thrown for flag combinations CLI11 cannot express on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClusterArgs {
  std::string engine = "ps";
  std::string input;
  std::string input_type = "vector";
  std::optional<std::size_t> dim;
  std::optional<std::size_t> num_points;
  std::optional<double> epsilon;
  std::size_t min_pts = 0;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::string mode = "simulated";
  std::string partition = "random";
  std::string index = "grid";
  std::string output;
  std::string metrics_out;
  // Resource panel values; recorded only.
  std::size_t servers = 1;
  std::size_t server_cores = 1;
  std::size_t worker_cores = 1;
  std::size_t server_memory = 0;
  std::size_t worker_memory = 0;
};

struct GenArgs {
  std::string kind;
  std::size_t num_points = 1000;
  std::size_t dim = 2;
  std::size_t clusters = 10;
  double spread = 0.01;
  double target_degree = 25;
  std::size_t span = 8;
  std::size_t segment_length = 1;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  std::string output;
};

struct BenchArgs {
  std::vector<std::string> datasets{"chain", "blobs"};
  std::vector<std::size_t> workers{4, 8, 16, 32};
  std::size_t num_points = 20000;
  std::optional<std::size_t> min_pts;
  std::uint64_t seed = 1;
  std::string partition = "contiguous";
  std::string format = "table";
};

PartitionStrategy to_partition(const std::string& s) {
  return s == "contiguous" ? PartitionStrategy::contiguous : PartitionStrategy::random;
}

NeighborSearch to_search(const std::string& s) {
  if (s == "brute") return NeighborSearch::brute_force;
  if (s == "grid-parallel") return NeighborSearch::grid_parallel;
  return NeighborSearch::grid;
}

json metrics_json(const CommMetrics& m) {
  json rounds = json::array();
  for (const auto& r : m.per_round) {
    rounds.push_back({{"round", r.round},
                      {"entries_pushed", r.entries_pushed},
                      {"entries_pulled", r.entries_pulled},
                      {"labels_changed", r.labels_changed}});
  }
  return {{"rounds", m.rounds},
          {"entries_pushed", m.entries_pushed},
          {"entries_pulled", m.entries_pulled},
          {"bitset_words_pushed", m.bitset_words_pushed},
          {"bitset_words_pulled", m.bitset_words_pulled},
          {"control_messages", m.control_messages},
          {"modeled_bytes", m.modeled_bytes()},
          {"monotonicity_violations", m.monotonicity_violations},
          {"per_round", rounds}};
}

template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InputError("cannot open output file " + path);
  fn(file);
  if (!file) throw InputError("failed writing " + path);
}

int do_cluster(const ClusterArgs& a, std::ostream& out, std::ostream& err) {
  const bool linkage = a.input_type == "linkage";
  if (linkage && a.epsilon) throw UsageError("--epsilon is meaningless for linkage input");
  if (linkage && a.dim) throw UsageError("--dim only applies to vector input");
  if (!linkage && !a.epsilon) throw UsageError("--epsilon is required for vector input");
  if (!linkage && a.num_points) throw UsageError("--num-points only applies to linkage input");
  if (a.engine != "ps" && a.mode != "simulated") throw UsageError("--mode only applies to --engine ps");
  if (a.engine == "sequential" && a.workers != 1) throw UsageError("--workers does not apply to the sequential engine");

  std::optional<Dataset> dataset;
  std::optional<NeighborGraph> graph;
  if (linkage) {
    graph = parse_linkage_file(a.input, a.num_points);
  } else {
    dataset = parse_vector_file(a.input);
    if (a.dim && *a.dim != dataset->dim()) {
      throw InputError("input has dimension " + std::to_string(dataset->dim()) + ", --dim says " +
                       std::to_string(*a.dim));
    }
    if (!(*a.epsilon > 0) || !std::isfinite(*a.epsilon)) throw InputError("--epsilon must be positive and finite");
  }
  const std::size_t n = dataset ? dataset->size() : graph->size();

  const auto start = std::chrono::steady_clock::now();
  ClusteringResult result;
  CommMetrics metrics;
  if (a.engine == "sequential") {
    if (!graph) graph = build_neighbor_graph(*dataset, *a.epsilon, to_search(a.index));
    result = sequential_dbscan(*graph, a.min_pts);
  } else if (a.engine == "ps") {
    PsOptions o;
    o.num_workers = a.workers;
    o.seed = a.seed;
    o.partition = to_partition(a.partition);
    o.mode = a.mode == "concurrent" ? ExecutionMode::concurrent : ExecutionMode::simulated;
    auto r = graph ? run_ps_dbscan(*graph, a.min_pts, o) : run_ps_dbscan(*dataset, *a.epsilon, a.min_pts, o);
    result = std::move(r.clustering);
    metrics = std::move(r.metrics);
  } else {
    if (!graph) graph = build_neighbor_graph(*dataset, *a.epsilon, to_search(a.index));
    P2pOptions o;
    o.num_workers = a.workers;
    o.seed = a.seed;
    o.partition = to_partition(a.partition);
    auto r = run_p2p_dbscan(*graph, a.min_pts, o);
    result = std::move(r.clustering);
    metrics = std::move(r.metrics);
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  with_output(a.output, out, [&](std::ostream& s) { write_labels(s, result); });

  json doc = metrics_json(metrics);
  doc["engine"] = a.engine;
  doc["wall_ms"] = wall_ms;
  doc["input"] = {{"type", a.input_type}, {"num_points", n}};
  if (dataset) doc["input"]["dim"] = dataset->dim();
  doc["params"] = {{"min_pts", a.min_pts}, {"workers", a.workers}, {"seed", a.seed},
                   {"mode", a.mode},       {"partition", a.partition}};
  if (a.epsilon) doc["params"]["epsilon"] = *a.epsilon;
  doc["resources"] = {{"servers", a.servers},
                      {"server_cores", a.server_cores},
                      {"worker_cores", a.worker_cores},
                      {"server_memory_mb", a.server_memory},
                      {"worker_memory_mb", a.worker_memory}};
  doc["num_clusters"] = result.num_clusters;
  doc["num_noise"] = result.num_noise();
  if (!a.metrics_out.empty()) {
    // Labels already own stdout when --output is absent.
    std::ostream& fallback = a.output.empty() ? err : out;
    with_output(a.metrics_out, fallback, [&](std::ostream& s) { s << doc.dump() << '\n'; });
  }
  return kExitOk;
}

int do_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  json meta = {{"kind", a.kind}, {"num_points", a.num_points}, {"seed", a.seed}};
  std::optional<Dataset> data;
  if (a.kind == "blobs") {
    data = gen_blobs(a.num_points, a.dim, a.clusters, a.spread, a.seed);
    if (a.epsilon) {
      meta["epsilon"] = *a.epsilon;
      meta["mean_degree"] = mean_degree(*data, *a.epsilon);
    }
  } else {
    if (a.epsilon) throw UsageError("--epsilon only applies to gen blobs");
    auto g = a.kind == "degree" ? gen_with_target_degree(a.num_points, a.target_degree, a.seed)
                                : gen_chain(a.num_points, a.span, a.seed, a.segment_length);
    meta["epsilon"] = g.eps;
    meta["mean_degree"] = g.mean_degree;
    data = std::move(g.dataset);
  }
  with_output(a.output, out, [&](std::ostream& s) { write_vector(s, *data); });
  err << meta.dump() << '\n';
  return kExitOk;
}

// Fixed instance families for the speedup table. Chain points have degree
// at most 2, so they always run with min_pts 2.
struct BenchInstance {
  NeighborGraph graph;
  std::size_t min_pts;
  double mean_degree;
};

BenchInstance make_bench_instance(const std::string& name, std::size_t n, std::size_t workers, std::uint64_t seed,
                                  std::optional<std::size_t> min_pts) {
  if (name == "chain") {
    auto g = gen_chain(n, workers, seed);
    return {build_neighbor_graph(g.dataset, g.eps), min_pts.value_or(2), g.mean_degree};
  }
  if (name == "blobs") {
    // eps 0.0023 gives a mean degree near 25 at 20000 points; keep the
    // degree roughly fixed for other sizes.
    const double eps = 0.0023 * std::sqrt(20000.0 / static_cast<double>(n));
    auto d = gen_blobs(n, 2, 10, 0.01, seed);
    auto graph = build_neighbor_graph(d, eps);
    const double deg = static_cast<double>(graph.num_entries() - graph.size()) / static_cast<double>(n);
    return {std::move(graph), min_pts.value_or(4), deg};
  }
  if (name.rfind("degree", 0) == 0) {
    double target = 0;
    try {
      target = std::stod(name.substr(6));
    } catch (const std::exception&) {
      throw UsageError("dataset '" + name + "' needs a numeric target, e.g. degree25");
    }
    auto g = gen_with_target_degree(n, target, seed);
    return {build_neighbor_graph(g.dataset, g.eps), min_pts.value_or(4), g.mean_degree};
  }
  throw UsageError("unknown bench dataset '" + name + "'");
}

int do_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<ComparisonRow> rows;
  std::vector<double> degrees;
  for (const auto& name : a.datasets) {
    std::optional<BenchInstance> shared;
    for (std::size_t w : a.workers) {
      // Chains are built to span exactly w workers; other instances are reused.
      if (name == "chain" || !shared) shared = make_bench_instance(name, a.num_points, w, a.seed, a.min_pts);
      rows.push_back(compare_engines(name, shared->graph, shared->min_pts, w, a.seed, to_partition(a.partition)));
      degrees.push_back(shared->mean_degree);
    }
  }
  bool all_ok = true;
  if (a.format == "json") {
    json doc = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      doc.push_back({{"dataset", r.dataset},
                     {"workers", r.workers},
                     {"mean_degree", degrees[i]},
                     {"p2p_messages", r.p2p_messages},
                     {"ps_entries", r.ps_entries},
                     {"speedup", r.speedup},
                     {"ps_rounds", r.ps_rounds},
                     {"p2p_rounds", r.p2p_rounds},
                     {"monotonicity_violations", r.monotonicity_violations},
                     {"matches_oracle", r.matches_oracle}});
      all_ok = all_ok && r.matches_oracle;
    }
    out << doc.dump(2) << '\n';
  } else {
    out << std::left << std::setw(12) << "dataset" << std::right << std::setw(8) << "workers" << std::setw(10)
        << "degree" << std::setw(14) << "p2p_msgs" << std::setw(12) << "ps_entries" << std::setw(10) << "speedup"
        << std::setw(10) << "ps_rnds" << std::setw(10) << "p2p_rnds" << std::setw(8) << "oracle" << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << std::left << std::setw(12) << r.dataset << std::right << std::setw(8) << r.workers << std::fixed
          << std::setprecision(1) << std::setw(10) << degrees[i] << std::setw(14) << r.p2p_messages << std::setw(12)
          << r.ps_entries << std::setprecision(2) << std::setw(10) << r.speedup << std::setw(10) << r.ps_rounds
          << std::setw(10) << r.p2p_rounds << std::setw(8) << (r.matches_oracle ? "ok" : "DIFF") << '\n';
      all_ok = all_ok && r.matches_oracle;
    }
  }
  if (!all_ok) throw ProtocolError("an engine disagreed with the sequential result");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PS-DBSCAN clustering engine and communication benchmark"};
  app.require_subcommand(1);

  ClusterArgs c;
  auto* cluster = app.add_subcommand("cluster", "cluster a vector or linkage file");
  cluster->add_option("--engine", c.engine, "ps, p2p or sequential")
      ->check(CLI::IsMember({"ps", "p2p", "sequential"}))
      ->capture_default_str();
  cluster->add_option("--input", c.input, "input CSV")->required();
  cluster->add_option("--input-type", c.input_type)->check(CLI::IsMember({"vector", "linkage"}))->capture_default_str();
  cluster->add_option("--dim", c.dim, "expected dimension, checked against the data");
  cluster->add_option("--num-points", c.num_points, "linkage node count (default: max id + 1)");
  cluster->add_option("--epsilon", c.epsilon, "neighborhood radius");
  cluster->add_option("--min-pts", c.min_pts, "density threshold, point itself counted")
      ->required()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--workers", c.workers)->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--seed", c.seed)->capture_default_str();
  cluster->add_option("--mode", c.mode)->check(CLI::IsMember({"simulated", "concurrent"}))->capture_default_str();
  cluster->add_option("--partition", c.partition)
      ->check(CLI::IsMember({"random", "contiguous"}))
      ->capture_default_str();
  cluster->add_option("--index", c.index, "neighbor search for p2p/sequential")
      ->check(CLI::IsMember({"brute", "grid", "grid-parallel"}))
      ->capture_default_str();
  cluster->add_option("--output", c.output, "labels CSV (default stdout)");
  cluster->add_option("--metrics-out", c.metrics_out, "metrics JSON file, '-' for the console");
  cluster->add_option("--servers", c.servers)->check(CLI::PositiveNumber);
  cluster->add_option("--server-cores", c.server_cores)->check(CLI::PositiveNumber);
  cluster->add_option("--worker-cores", c.worker_cores)->check(CLI::PositiveNumber);
  cluster->add_option("--server-memory", c.server_memory, "MB");
  cluster->add_option("--worker-memory", c.worker_memory, "MB");

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "generate a vector CSV dataset");
  gen->add_option("kind", g.kind)->required()->check(CLI::IsMember({"blobs", "degree", "chain"}));
  gen->add_option("--num-points", g.num_points)->capture_default_str();
  gen->add_option("--dim", g.dim, "blobs")->capture_default_str();
  gen->add_option("--clusters", g.clusters, "blobs")->capture_default_str();
  gen->add_option("--spread", g.spread, "blobs")->capture_default_str();
  gen->add_option("--epsilon", g.epsilon, "blobs: report the mean degree at this radius");
  gen->add_option("--target-degree", g.target_degree, "degree")->capture_default_str();
  gen->add_option("--span", g.span, "chain: workers the chain is laid across")->capture_default_str();
  gen->add_option("--segment-length", g.segment_length, "chain")->capture_default_str();
  gen->add_option("--seed", g.seed)->capture_default_str();
  gen->add_option("--output", g.output, "vector CSV (default stdout)");

  BenchArgs b;
  auto* bench = app.add_subcommand("bench", "p2p messages vs ps pushed entries over workers and datasets");
  bench->add_option("--datasets", b.datasets, "chain, blobs, degree<T>")->delimiter(',')->capture_default_str();
  bench->add_option("--workers", b.workers)->delimiter(',')->capture_default_str();
  bench->add_option("--num-points", b.num_points)->capture_default_str();
  bench->add_option("--min-pts", b.min_pts, "override per-dataset default (chain 2, others 4)");
  bench->add_option("--seed", b.seed)->capture_default_str();
  bench->add_option("--partition", b.partition)->check(CLI::IsMember({"random", "contiguous"}))->capture_default_str();
  bench->add_option("--format", b.format)->check(CLI::IsMember({"table", "json"}))->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (cluster->parsed()) return do_cluster(c, out, err);
    if (gen->parsed()) return do_gen(g, out, err);
    return do_bench(b, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ProtocolError& e) {
    err << "protocol error: " << e.what() << '\n';
    return kExitProtocol;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace psdbscan
