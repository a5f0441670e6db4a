#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psdbscan/clustering.hpp"
#include "psdbscan/comm_metrics.hpp"
#include "psdbscan/dataset.hpp"
#include "psdbscan/disjoint_set.hpp"
#include "psdbscan/neighborhood.hpp"
#include "psdbscan/point_bitset.hpp"
#include "psdbscan/types.hpp"

namespace psdbscan {

enum class PartitionStrategy { random, contiguous };
enum class ExecutionMode { simulated, concurrent };

/// Splits [0, n) into num_workers disjoint, covering, ascending id sets.
/// Contiguous: block split with sizes differing by at most one. Random: a
/// seeded uniform shuffle followed by the same block split.
/// Throws InputError if num_workers == 0 or num_workers > n.
std::vector<std::vector<PointId>> partition_points(std::size_t n, std::size_t num_workers,
                                                   std::uint64_t seed, PartitionStrategy strategy);

struct LabelEntry {
  PointId index;
  Label label;

  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

/// Validates a caller-supplied partition: num sets >= 1, disjoint, covering
/// [0, n). Throws InputError otherwise.
void check_partition(const std::vector<std::vector<PointId>>& parts, std::size_t n);

/// Owned sets from explicit_partition when given, else partition_points.
std::vector<std::vector<PointId>> resolve_partition(std::size_t n, std::size_t num_workers,
                                                    std::uint64_t seed, PartitionStrategy strategy,
                                                    const std::vector<std::vector<PointId>>& explicit_partition);

/// Fills `out` with the sorted eps-neighborhood of a point.
using NeighborQuery = std::function<void(PointId, std::vector<PointId>& out)>;

/// Result of CheckAndGetMaxLabel: the maximum current label of every local
/// cluster fragment and the label each border attachment would adopt.
struct MaxLabelPlan {
  bool finished = true;
  std::vector<Label> fragment_max;
  std::vector<Label> border_max;
};

/// One worker of the parameter-server protocol. Holds full-length label and
/// disjoint-set arrays; only ids the worker has seen (owned points, core
/// neighbors of owned points, and border attachments) are ever touched.
class PsWorker {
 public:
  PsWorker(std::size_t worker_id, std::vector<PointId> owned, std::size_t num_points);

  std::size_t id() const noexcept { return id_; }
  std::span<const PointId> owned() const noexcept { return owned_; }
  std::size_t num_points() const noexcept { return n_; }

  /// QueryRadius for every owned point.
  void load_neighbors(const NeighborQuery& query);
  std::span<const PointId> neighbors_of_owned(std::size_t owned_index) const {
    return {nbr_ids_.data() + nbr_offsets_[owned_index], nbr_ids_.data() + nbr_offsets_[owned_index + 1]};
  }

  /// MarkCorePoint over owned points; bits of non-owned points stay 0.
  const CoreRecord& mark_core(std::size_t min_points);
  const CoreRecord& local_core() const noexcept { return local_core_; }

  /// LocalMerge: unions core-core adjacencies seen from owned points,
  /// records core-border attachments, marks owned noise, and labels every
  /// tracked point with the maximum id of its fragment (dirty where that
  /// differs from the server's initial value).
  void local_merge(const CoreRecord& global_core);
  const PointBitset& local_noise() const noexcept { return local_noise_; }

  /// Read-only fixpoint check and plan.
  MaxLabelPlan get_max_label() const;

  /// Applies a plan; changed indices become dirty.
  void propagate_max_label(const MaxLabelPlan& plan);

  /// Sparse push: the dirty entries in ascending index order. Clears the
  /// dirty set.
  std::vector<LabelEntry> take_dirty();
  bool has_dirty() const noexcept { return !dirty_list_.empty(); }
  std::size_t dirty_count() const noexcept { return dirty_list_.size(); }

  /// GlobalUnion against a pulled snapshot. Scans ids from N-1 down to 0,
  /// resolving every label chain of the snapshot to its root in one hop,
  /// then rewrites each tracked label to that root. Owned entries whose root
  /// differs from the snapshot value become dirty so the server compresses
  /// too. Throws ProtocolError if a chain does not ascend to a core root.
  void global_union(std::span<const Label> global_labels);

  /// Convergence flag sent to the server: nothing to propagate, nothing
  /// unsent.
  bool ready_to_stop() const { return !has_dirty() && get_max_label().finished; }

  std::span<const Label> labels() const noexcept { return labels_; }
  Label label(PointId p) const { return labels_[p]; }
  const std::vector<PointId>& tracked_cores() const noexcept { return tracked_cores_; }
  const std::vector<PointId>& tracked_borders() const noexcept { return borders_; }
  std::size_t num_fragments() const noexcept { return fragment_offsets_.empty() ? 0 : fragment_offsets_.size() - 1; }
  std::span<const PointId> fragment(std::size_t f) const {
    return {fragment_members_.data() + fragment_offsets_[f],
            fragment_members_.data() + fragment_offsets_[f + 1]};
  }

  /// Test hook: overwrite a tracked label without touching the dirty set.
  void set_label_for_testing(PointId p, Label value) { labels_[p] = value; }

 private:
  void set_label(PointId p, Label value);
  void mark_dirty(PointId p);

  std::size_t id_;
  std::size_t n_;
  std::vector<PointId> owned_;
  std::vector<std::size_t> nbr_offsets_;
  std::vector<PointId> nbr_ids_;

  PointBitset owned_mask_;
  CoreRecord local_core_;
  CoreRecord global_core_;
  PointBitset local_noise_;
  DisjointSet local_clusters_;

  std::vector<PointId> tracked_cores_;
  std::vector<std::size_t> fragment_offsets_;
  std::vector<PointId> fragment_members_;
  std::vector<std::size_t> fragment_of_;  // indexed by id; only valid for tracked cores

  std::vector<PointId> borders_;
  std::vector<std::size_t> attach_offsets_;
  std::vector<PointId> attach_cores_;

  std::vector<Label> labels_;
  std::vector<Label> compressed_;  // scratch for global_union
  std::vector<std::uint8_t> dirty_flag_;
  std::vector<PointId> dirty_list_;
};

/// Server-side state: the global core record and the global label vector
/// with max-reduce semantics.
class ParameterServer {
 public:
  explicit ParameterServer(std::size_t num_points);

  std::size_t num_points() const noexcept { return n_; }

  /// Bitwise OR of one record per worker. Throws ProtocolError unless
  /// exactly `expected_workers` records are supplied.
  const CoreRecord& reduce_core(std::span<const CoreRecord> pushes, std::size_t expected_workers);
  const CoreRecord& global_core() const noexcept { return global_core_; }

  /// InitOnServer: cores take their own id, noise takes kNoise, border
  /// points start at 0 (the identity of max over ids).
  void init_labels(std::span<const PointBitset> noise_pushes, std::size_t expected_workers);

  /// Synchronous max reduce of sparse pushes. Returns the number of entries
  /// whose value changed. NOISE never takes part; a push that disagrees with
  /// the server about noise raises ProtocolError.
  std::size_t max_reduce(std::span<const std::vector<LabelEntry>> pushes);

  /// Snapshot handed to pulls.
  std::span<const Label> labels() const noexcept { return labels_; }

  /// Number of per-index decreases observed between consecutive snapshots.
  /// Max reduce can never produce one; the audit checks that it did not.
  std::size_t monotonicity_violations() const noexcept { return violations_; }

 private:
  std::size_t n_;
  CoreRecord global_core_;
  std::vector<Label> labels_;
  std::vector<Label> previous_;
  std::size_t violations_ = 0;
};

struct PsOptions {
  std::size_t num_workers = 1;
  std::uint64_t seed = 0;
  PartitionStrategy partition = PartitionStrategy::random;
  ExecutionMode mode = ExecutionMode::simulated;
  std::chrono::milliseconds barrier_timeout{60'000};
  /// When non-empty, used verbatim as the owned sets instead of
  /// partition_points (must partition [0, N)).
  std::vector<std::vector<PointId>> explicit_partition;
  /// Called with (round, global labels) after every label reduce.
  std::function<void(std::size_t, std::span<const Label>)> on_label_barrier;
};

struct RunOutput {
  ClusteringResult clustering;
  CommMetrics metrics;
};

/// Full PS-DBSCAN run over a precomputed neighbor graph.
RunOutput run_ps_dbscan(const NeighborGraph& graph, std::size_t min_points, const PsOptions& options);

/// Full PS-DBSCAN run over raw points; each worker issues its own radius
/// queries against a shared read-only grid index.
RunOutput run_ps_dbscan(const Dataset& dataset, double eps, std::size_t min_points,
                        const PsOptions& options);

}  // namespace psdbscan
