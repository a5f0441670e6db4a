#include "psdbscan/ps_engine.hpp"

#include <algorithm>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "psdbscan/barrier_channel.hpp"

namespace psdbscan {

std::vector<std::vector<PointId>> partition_points(std::size_t n, std::size_t num_workers,
                                                   std::uint64_t seed, PartitionStrategy strategy) {
  if (num_workers == 0) throw InputError("num_workers must be at least 1");
  if (num_workers > n) {
    throw InputError("num_workers (" + std::to_string(num_workers) + ") exceeds point count (" +
                     std::to_string(n) + ")");
  }
  std::vector<PointId> order(n);
  std::iota(order.begin(), order.end(), PointId{0});
  if (strategy == PartitionStrategy::random) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<PointId>> parts(num_workers);
  const std::size_t base = n / num_workers;
  const std::size_t extra = n % num_workers;
  std::size_t pos = 0;
  for (std::size_t w = 0; w < num_workers; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    parts[w].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(parts[w].begin(), parts[w].end());
    pos += len;
  }
  return parts;
}

void check_partition(const std::vector<std::vector<PointId>>& parts, std::size_t n) {
  if (parts.empty()) throw InputError("partition has no workers");
  std::vector<std::uint8_t> seen(n, 0);
  std::size_t total = 0;
  for (const auto& part : parts) {
    if (part.empty()) throw InputError("partition contains an empty worker");
    for (PointId p : part) {
      if (p >= n) throw InputError("partition id " + std::to_string(p) + " out of range");
      if (seen[p]++) throw InputError("partition assigns " + std::to_string(p) + " twice");
      ++total;
    }
  }
  if (total != n) throw InputError("partition does not cover every point");
}

std::vector<std::vector<PointId>> resolve_partition(std::size_t n, std::size_t num_workers,
                                                    std::uint64_t seed, PartitionStrategy strategy,
                                                    const std::vector<std::vector<PointId>>& explicit_partition) {
  if (explicit_partition.empty()) return partition_points(n, num_workers, seed, strategy);
  check_partition(explicit_partition, n);
  auto parts = explicit_partition;
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

// ---------------------------------------------------------------------------
// PsWorker

PsWorker::PsWorker(std::size_t worker_id, std::vector<PointId> owned, std::size_t num_points)
    : id_(worker_id),
      n_(num_points),
      owned_(std::move(owned)),
      owned_mask_(num_points),
      local_core_(num_points),
      global_core_(num_points),
      local_noise_(num_points),
      local_clusters_(num_points),
      fragment_of_(num_points, 0),
      labels_(num_points, kNoise),
      dirty_flag_(num_points, 0) {
  std::sort(owned_.begin(), owned_.end());
  for (PointId p : owned_) {
    if (p >= n_) throw InputError("owned point " + std::to_string(p) + " out of range");
    owned_mask_.set(p);
  }
  nbr_offsets_.assign(1, 0);
}

void PsWorker::load_neighbors(const NeighborQuery& query) {
  nbr_offsets_.assign(1, 0);
  nbr_ids_.clear();
  std::vector<PointId> buffer;
  for (PointId p : owned_) {
    query(p, buffer);
    nbr_ids_.insert(nbr_ids_.end(), buffer.begin(), buffer.end());
    nbr_offsets_.push_back(nbr_ids_.size());
  }
}

const CoreRecord& PsWorker::mark_core(std::size_t min_points) {
  if (min_points < 1) throw InputError("min_points must be at least 1");
  local_core_ = CoreRecord(n_);
  for (std::size_t i = 0; i < owned_.size(); ++i) {
    if (nbr_offsets_[i + 1] - nbr_offsets_[i] >= min_points) local_core_.set(owned_[i]);
  }
  return local_core_;
}

void PsWorker::mark_dirty(PointId p) {
  if (!dirty_flag_[p]) {
    dirty_flag_[p] = 1;
    dirty_list_.push_back(p);
  }
}

void PsWorker::set_label(PointId p, Label value) {
  if (labels_[p] != value) {
    labels_[p] = value;
    mark_dirty(p);
  }
}

void PsWorker::local_merge(const CoreRecord& global_core) {
  if (global_core.size() != n_) throw ProtocolError("core record length mismatch");
  global_core_ = global_core;

  std::vector<std::uint8_t> seen(n_, 0);
  tracked_cores_.clear();
  auto track = [&](PointId c) {
    if (!seen[c]) {
      seen[c] = 1;
      tracked_cores_.push_back(c);
    }
  };
  std::vector<std::pair<PointId, PointId>> attachments;  // (border, core)

  for (std::size_t i = 0; i < owned_.size(); ++i) {
    const PointId p = owned_[i];
    const auto nbrs = neighbors_of_owned(i);
    if (global_core_.test(p)) {
      track(p);
      for (PointId q : nbrs) {
        if (q == p) continue;
        if (global_core_.test(q)) {
          track(q);
          local_clusters_.unite(p, q);
        } else {
          attachments.emplace_back(q, p);
        }
      }
    } else {
      bool attached = false;
      for (PointId q : nbrs) {
        if (!global_core_.test(q)) continue;
        attached = true;
        track(q);
        attachments.emplace_back(p, q);
      }
      if (!attached) local_noise_.set(p);
    }
  }
  std::sort(tracked_cores_.begin(), tracked_cores_.end());

  // Fragments: tracked cores grouped by local root.
  std::vector<std::pair<PointId, PointId>> by_root;
  by_root.reserve(tracked_cores_.size());
  for (PointId c : tracked_cores_) by_root.emplace_back(local_clusters_.find(c), c);
  std::sort(by_root.begin(), by_root.end());
  fragment_offsets_.assign(1, 0);
  fragment_members_.clear();
  for (std::size_t k = 0; k < by_root.size(); ++k) {
    if (k > 0 && by_root[k].first != by_root[k - 1].first) fragment_offsets_.push_back(fragment_members_.size());
    fragment_of_[by_root[k].second] = fragment_offsets_.size() - 1;
    fragment_members_.push_back(by_root[k].second);
  }
  if (!fragment_members_.empty()) fragment_offsets_.push_back(fragment_members_.size());

  std::sort(attachments.begin(), attachments.end());
  attachments.erase(std::unique(attachments.begin(), attachments.end()), attachments.end());
  borders_.clear();
  attach_offsets_.assign(1, 0);
  attach_cores_.clear();
  for (std::size_t k = 0; k < attachments.size(); ++k) {
    if (k == 0 || attachments[k].first != attachments[k - 1].first) {
      if (k > 0) attach_offsets_.push_back(attach_cores_.size());
      borders_.push_back(attachments[k].first);
    }
    attach_cores_.push_back(attachments[k].second);
  }
  if (!attach_cores_.empty()) attach_offsets_.push_back(attach_cores_.size());

  // Start from the server's initial values, then take fragment maxima.
  for (PointId c : tracked_cores_) labels_[c] = c;
  for (PointId b : borders_) labels_[b] = 0;
  for (PointId p : owned_) {
    if (local_noise_.test(p)) labels_[p] = kNoise;
  }
  propagate_max_label(get_max_label());
}

MaxLabelPlan PsWorker::get_max_label() const {
  MaxLabelPlan plan;
  const std::size_t fragments = num_fragments();
  plan.fragment_max.resize(fragments, 0);
  for (std::size_t f = 0; f < fragments; ++f) {
    Label best = 0;
    for (PointId m : fragment(f)) best = std::max(best, labels_[m]);
    plan.fragment_max[f] = best;
    for (PointId m : fragment(f)) {
      if (labels_[m] != best) {
        plan.finished = false;
        break;
      }
    }
  }
  plan.border_max.resize(borders_.size(), 0);
  for (std::size_t j = 0; j < borders_.size(); ++j) {
    Label best = 0;
    for (std::size_t k = attach_offsets_[j]; k < attach_offsets_[j + 1]; ++k) {
      best = std::max(best, plan.fragment_max[fragment_of_[attach_cores_[k]]]);
    }
    plan.border_max[j] = best;
    if (best > labels_[borders_[j]]) plan.finished = false;
  }
  return plan;
}

void PsWorker::propagate_max_label(const MaxLabelPlan& plan) {
  if (plan.fragment_max.size() != num_fragments() || plan.border_max.size() != borders_.size()) {
    throw ProtocolError("max-label plan does not match worker " + std::to_string(id_));
  }
  for (std::size_t f = 0; f < num_fragments(); ++f) {
    const Label best = plan.fragment_max[f];
    for (PointId m : fragment(f)) {
      const Label old = labels_[m];
      if (best <= old) continue;
      set_label(m, best);
      // Hook the old root as well, otherwise the rest of its tree only
      // learns about the merge one hop per round.
      if (old == m || old >= n_ || !global_core_.test(old)) continue;
      if (labels_[old] == kNoise || best > labels_[old]) set_label(old, best);
    }
  }
  for (std::size_t j = 0; j < borders_.size(); ++j) {
    if (plan.border_max[j] > labels_[borders_[j]]) set_label(borders_[j], plan.border_max[j]);
  }
}

std::vector<LabelEntry> PsWorker::take_dirty() {
  std::sort(dirty_list_.begin(), dirty_list_.end());
  std::vector<LabelEntry> push;
  push.reserve(dirty_list_.size());
  for (PointId p : dirty_list_) {
    push.push_back({p, labels_[p]});
    dirty_flag_[p] = 0;
  }
  dirty_list_.clear();
  return push;
}

void PsWorker::global_union(std::span<const Label> global_labels) {
  if (global_labels.size() != n_) throw ProtocolError("pulled label vector length mismatch");
  if (has_dirty()) {
    throw ProtocolError("worker " + std::to_string(id_) + " pulled with unsent label entries");
  }
  // Core label chains point strictly upward, so a descending scan sees each
  // target's root before anything that references it.
  compressed_.assign(n_, kNoise);
  for (std::size_t k = n_; k-- > 0;) {
    const auto i = static_cast<PointId>(k);
    const Label g = global_labels[i];
    if (g == kNoise || !global_core_.test(i)) continue;
    if (g == i) {
      compressed_[i] = i;
    } else if (g > i && g < n_ && global_core_.test(g)) {
      compressed_[i] = compressed_[g];
    } else {
      throw ProtocolError("label chain at " + std::to_string(i) + " -> " + std::to_string(g) +
                          " does not ascend to a core root");
    }
  }
  auto resolve = [&](PointId i) -> Label {
    const Label g = global_labels[i];
    if (g == kNoise) throw ProtocolError("tracked point " + std::to_string(i) + " is noise on the server");
    if (global_core_.test(i)) return compressed_[i];
    if (g >= n_ || !global_core_.test(g)) {
      throw ProtocolError("border " + std::to_string(i) + " labeled with non-core " + std::to_string(g));
    }
    return compressed_[g];
  };
  auto apply = [&](PointId i) {
    const Label root = resolve(i);
    if (root < labels_[i]) {
      throw ProtocolError("global union would lower label of " + std::to_string(i));
    }
    labels_[i] = root;
    // Every worker derives the same root from the same snapshot; only the
    // owner writes the compression back.
    if (root != global_labels[i] && owned_mask_.test(i)) mark_dirty(i);
  };
  for (PointId c : tracked_cores_) apply(c);
  for (PointId b : borders_) apply(b);
}

// ---------------------------------------------------------------------------
// ParameterServer

ParameterServer::ParameterServer(std::size_t num_points)
    : n_(num_points), global_core_(num_points), labels_(num_points, kNoise), previous_(num_points, kNoise) {}

const CoreRecord& ParameterServer::reduce_core(std::span<const CoreRecord> pushes,
                                               std::size_t expected_workers) {
  if (pushes.size() != expected_workers) {
    throw ProtocolError("core reduce expected " + std::to_string(expected_workers) + " pushes, got " +
                        std::to_string(pushes.size()));
  }
  CoreRecord merged(n_);
  for (const auto& push : pushes) {
    if (push.size() != n_) throw ProtocolError("core record length mismatch");
    merged |= push;
  }
  global_core_ = std::move(merged);
  return global_core_;
}

void ParameterServer::init_labels(std::span<const PointBitset> noise_pushes, std::size_t expected_workers) {
  if (noise_pushes.size() != expected_workers) {
    throw ProtocolError("noise reduce expected " + std::to_string(expected_workers) + " pushes, got " +
                        std::to_string(noise_pushes.size()));
  }
  PointBitset noise(n_);
  for (const auto& push : noise_pushes) {
    if (push.size() != n_) throw ProtocolError("noise record length mismatch");
    noise |= push;
  }
  for (std::size_t k = 0; k < n_; ++k) {
    const auto i = static_cast<PointId>(k);
    const bool core = global_core_.test(i);
    if (core && noise.test(i)) throw ProtocolError("point " + std::to_string(i) + " reported as core and noise");
    labels_[i] = core ? i : (noise.test(i) ? kNoise : Label{0});
  }
  previous_ = labels_;
}

std::size_t ParameterServer::max_reduce(std::span<const std::vector<LabelEntry>> pushes) {
  for (const auto& push : pushes) {
    for (const auto& [index, label] : push) {
      if (index >= n_) throw ProtocolError("pushed index " + std::to_string(index) + " out of range");
      if (labels_[index] == kNoise || label == kNoise) {
        throw ProtocolError("noise mismatch at index " + std::to_string(index) +
                            ": core records are inconsistent");
      }
      if (label >= n_) throw ProtocolError("pushed label " + std::to_string(label) + " out of range");
      labels_[index] = std::max(labels_[index], label);
    }
  }
  std::size_t changed = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (labels_[i] == previous_[i]) continue;
    ++changed;
    if (previous_[i] != kNoise && labels_[i] < previous_[i]) ++violations_;
  }
  previous_ = labels_;
  return changed;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

struct NoReply {};

// Server-side bookkeeping shared by both execution modes so their metrics
// are computed by the same code.
class Coordinator {
 public:
  Coordinator(std::size_t n, std::size_t workers, const PsOptions& options)
      : server_(n), workers_(workers), options_(options) {}

  const CoreRecord& core_round(std::span<const CoreRecord> pushes) {
    const auto& merged = server_.reduce_core(pushes, workers_);
    metrics_.bitset_words_pushed += workers_ * merged.num_words();
    metrics_.bitset_words_pulled += workers_ * merged.num_words();
    return merged;
  }

  void noise_round(std::span<const PointBitset> pushes) {
    server_.init_labels(pushes, workers_);
    for (const auto& p : pushes) metrics_.bitset_words_pushed += p.num_words();
  }

  bool control_round(const std::vector<bool>& ready) {
    metrics_.control_messages += 2 * workers_;
    if (std::all_of(ready.begin(), ready.end(), [](bool r) { return r; })) return true;
    // Every round moves at least one label upward, so n + 1 rounds bound
    // any correct execution.
    if (metrics_.rounds > server_.num_points() + 1) {
      throw ProtocolError("label loop did not converge after " + std::to_string(metrics_.rounds) + " rounds");
    }
    return false;
  }

  void label_round(std::span<const std::vector<LabelEntry>> pushes) {
    if (pushes.size() != workers_) throw ProtocolError("label reduce missing worker pushes");
    RoundMetrics round;
    round.round = ++metrics_.rounds;
    for (const auto& p : pushes) round.entries_pushed += p.size();
    round.labels_changed = server_.max_reduce(pushes);
    round.entries_pulled = workers_ * server_.num_points();
    metrics_.entries_pushed += round.entries_pushed;
    metrics_.entries_pulled += round.entries_pulled;
    metrics_.per_round.push_back(round);
    if (options_.on_label_barrier) options_.on_label_barrier(round.round, server_.labels());
  }

  RunOutput finish() {
    metrics_.monotonicity_violations = server_.monotonicity_violations();
    std::vector<Label> labels(server_.labels().begin(), server_.labels().end());
    return {make_result(std::move(labels), server_.global_core()), metrics_};
  }

  const ParameterServer& server() const { return server_; }

 private:
  ParameterServer server_;
  std::size_t workers_;
  const PsOptions& options_;
  CommMetrics metrics_;
};

RunOutput run_simulated(std::vector<PsWorker>& workers, Coordinator& coord, const NeighborQuery& query,
                        std::size_t min_points) {
  std::vector<CoreRecord> core_pushes;
  for (auto& w : workers) {
    w.load_neighbors(query);
    core_pushes.push_back(w.mark_core(min_points));
  }
  const CoreRecord global_core = coord.core_round(core_pushes);

  std::vector<PointBitset> noise_pushes;
  for (auto& w : workers) {
    w.local_merge(global_core);
    noise_pushes.push_back(w.local_noise());
  }
  coord.noise_round(noise_pushes);

  std::vector<MaxLabelPlan> plans;
  for (auto& w : workers) plans.push_back(w.get_max_label());

  while (true) {
    std::vector<bool> ready;
    for (std::size_t k = 0; k < workers.size(); ++k) {
      ready.push_back(plans[k].finished && !workers[k].has_dirty());
    }
    if (coord.control_round(ready)) break;

    std::vector<std::vector<LabelEntry>> pushes;
    for (std::size_t k = 0; k < workers.size(); ++k) {
      workers[k].propagate_max_label(plans[k]);
      pushes.push_back(workers[k].take_dirty());
    }
    coord.label_round(pushes);
    for (std::size_t k = 0; k < workers.size(); ++k) {
      workers[k].global_union(coord.server().labels());
      plans[k] = workers[k].get_max_label();
    }
  }
  return coord.finish();
}

RunOutput run_concurrent(std::vector<PsWorker>& workers, Coordinator& coord, const NeighborQuery& query,
                         std::size_t min_points, std::chrono::milliseconds timeout) {
  const std::size_t count = workers.size();
  BarrierChannel<CoreRecord, CoreRecord> core_channel(count, timeout);
  BarrierChannel<PointBitset, NoReply> noise_channel(count, timeout);
  BarrierChannel<bool, bool> control_channel(count, timeout);
  BarrierChannel<std::vector<LabelEntry>, std::vector<Label>> label_channel(count, timeout);

  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto fail = [&](std::exception_ptr error) {
    {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = error;
    }
    core_channel.abort();
    noise_channel.abort();
    control_channel.abort();
    label_channel.abort();
  };

  RunOutput output;
  std::thread server_thread([&] {
    try {
      auto core_pushes = core_channel.collect(0);
      core_channel.publish(std::make_shared<const CoreRecord>(coord.core_round(core_pushes)));
      auto noise_pushes = noise_channel.collect(0);
      coord.noise_round(noise_pushes);
      noise_channel.publish(std::make_shared<const NoReply>());
      for (std::size_t round = 1;; ++round) {
        const bool done = coord.control_round(control_channel.collect(round));
        control_channel.publish(std::make_shared<const bool>(done));
        if (done) break;
        auto pushes = label_channel.collect(round);
        coord.label_round(pushes);
        const auto snapshot = coord.server().labels();
        label_channel.publish(std::make_shared<const std::vector<Label>>(snapshot.begin(), snapshot.end()));
      }
      output = coord.finish();
    } catch (...) {
      fail(std::current_exception());
    }
  });

  std::vector<std::thread> threads;
  threads.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    threads.emplace_back([&, k] {
      try {
        PsWorker& w = workers[k];
        w.load_neighbors(query);
        const auto global_core = core_channel.exchange(k, w.mark_core(min_points), 0);
        w.local_merge(*global_core);
        noise_channel.exchange(k, w.local_noise(), 0);
        MaxLabelPlan plan = w.get_max_label();
        for (std::size_t round = 1;; ++round) {
          const auto done = control_channel.exchange(k, plan.finished && !w.has_dirty(), round);
          if (*done) break;
          w.propagate_max_label(plan);
          const auto snapshot = label_channel.exchange(k, w.take_dirty(), round);
          w.global_union(*snapshot);
          plan = w.get_max_label();
        }
      } catch (...) {
        fail(std::current_exception());
      }
    });
  }
  for (auto& t : threads) t.join();
  server_thread.join();
  if (first_error) std::rethrow_exception(first_error);
  return output;
}

RunOutput run_ps(std::size_t n, const NeighborQuery& query, std::size_t min_points, const PsOptions& options) {
  if (min_points < 1) throw InputError("min_points must be at least 1");
  auto parts = resolve_partition(n, options.num_workers, options.seed, options.partition,
                                 options.explicit_partition);
  std::vector<PsWorker> workers;
  workers.reserve(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) workers.emplace_back(k, std::move(parts[k]), n);
  Coordinator coord(n, workers.size(), options);
  if (options.mode == ExecutionMode::simulated) return run_simulated(workers, coord, query, min_points);
  return run_concurrent(workers, coord, query, min_points, options.barrier_timeout);
}

}  // namespace

RunOutput run_ps_dbscan(const NeighborGraph& graph, std::size_t min_points, const PsOptions& options) {
  const NeighborQuery query = [&graph](PointId p, std::vector<PointId>& out) {
    const auto nbrs = graph.neighbors(p);
    out.assign(nbrs.begin(), nbrs.end());
  };
  return run_ps(graph.size(), query, min_points, options);
}

RunOutput run_ps_dbscan(const Dataset& dataset, double eps, std::size_t min_points, const PsOptions& options) {
  const GridIndex index(dataset, eps);
  const NeighborQuery query = [&index](PointId p, std::vector<PointId>& out) { index.query_into(p, out); };
  return run_ps(dataset.size(), query, min_points, options);
}

}  // namespace psdbscan
