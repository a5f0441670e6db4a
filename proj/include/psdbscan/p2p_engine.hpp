#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psdbscan/clustering.hpp"
#include "psdbscan/comm_metrics.hpp"
#include "psdbscan/dataset.hpp"
#include "psdbscan/neighborhood.hpp"
#include "psdbscan/ps_engine.hpp"
#include "psdbscan/types.hpp"

namespace psdbscan {

enum class MessageKind {
  merge,    // union request for a cross-worker core-core adjacency
  forward,  // union request re-routed along a remote parent pointer
  find,     // root lookup for a remote parent, plus its forwards
  reply,    // root returned to the worker that asked
};

/// One counted peer-to-peer message.
struct MergeRequest {
  std::size_t from_worker;
  std::size_t to_worker;
  PointId local_id;   // point the request is about, as known by the sender
  PointId remote_id;  // point owned by the receiver
  std::size_t hop;    // 0 for the original request, +1 per forward
  MessageKind kind;
  /// Point whose root lookup started this chain (find/reply only).
  PointId origin = 0;
};

struct P2pOptions {
  std::size_t num_workers = 1;
  std::uint64_t seed = 0;
  PartitionStrategy partition = PartitionStrategy::random;
  std::vector<std::vector<PointId>> explicit_partition;
  /// Keep every message in P2pOutput::messages.
  bool record_messages = false;
};

struct P2pOutput {
  ClusteringResult clustering;
  /// entries_pushed = total messages; rounds = merge-phase delivery rounds
  /// plus the deepest find/reply chain.
  CommMetrics metrics;
  std::vector<MergeRequest> messages;
};

/// Simulated disjoint-set DBSCAN with peer-to-peer merging. Workers first
/// union their own core points, then send one union request per directed
/// cross-worker core-core adjacency to the owner of the remote point. A
/// receiver walks its local parent chain; reaching a remote parent forwards
/// the request. Parents always point to larger ids, so roots end up at each
/// cluster's maximum id. Finally every worker resolves the roots it needs,
/// paying one message per remote owner on the parent chain plus the reply.
P2pOutput run_p2p_dbscan(const NeighborGraph& graph, std::size_t min_points, const P2pOptions& options);

P2pOutput run_p2p_dbscan(const Dataset& dataset, double eps, std::size_t min_points,
                         const P2pOptions& options);

}  // namespace psdbscan
