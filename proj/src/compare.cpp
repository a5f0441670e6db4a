#include "psdbscan/compare.hpp"

#include "psdbscan/clustering.hpp"
#include "psdbscan/p2p_engine.hpp"

namespace psdbscan {

ComparisonRow compare_engines(const std::string& dataset, const NeighborGraph& graph, std::size_t min_points,
                              std::size_t workers, std::uint64_t seed, PartitionStrategy partition) {
  PsOptions ps_options;
  ps_options.num_workers = workers;
  ps_options.seed = seed;
  ps_options.partition = partition;
  const auto ps = run_ps_dbscan(graph, min_points, ps_options);

  P2pOptions p2p_options;
  p2p_options.num_workers = workers;
  p2p_options.seed = seed;
  p2p_options.partition = partition;
  const auto p2p = run_p2p_dbscan(graph, min_points, p2p_options);

  const auto oracle = sequential_dbscan(graph, min_points);

  ComparisonRow row;
  row.dataset = dataset;
  row.workers = workers;
  row.p2p_messages = p2p.metrics.entries_pushed;
  row.ps_entries = ps.metrics.entries_pushed;
  row.speedup = row.ps_entries == 0 ? 0.0
                                    : static_cast<double>(row.p2p_messages) / static_cast<double>(row.ps_entries);
  row.ps_rounds = ps.metrics.rounds;
  row.p2p_rounds = p2p.metrics.rounds;
  row.monotonicity_violations = ps.metrics.monotonicity_violations;
  row.matches_oracle = ps.clustering == oracle && p2p.clustering == oracle;
  return row;
}

}  // namespace psdbscan
