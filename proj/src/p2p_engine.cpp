#include "psdbscan/p2p_engine.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace psdbscan {

namespace {

struct Link {
  std::size_t from;
  std::size_t to;
  PointId a;  // point to be joined with b's set
  PointId b;  // owned by `to`
  std::size_t hop;
  MessageKind kind;
};

class P2pSimulation {
 public:
  P2pSimulation(const NeighborGraph& graph, std::size_t min_points, const P2pOptions& options)
      : graph_(graph), n_(graph.size()), options_(options), core_(graph.size()), parent_(graph.size()) {
    if (min_points < 1) throw InputError("min_points must be at least 1");
    parts_ = resolve_partition(n_, options.num_workers, options.seed, options.partition,
                               options.explicit_partition);
    owner_.assign(n_, 0);
    for (std::size_t w = 0; w < parts_.size(); ++w) {
      for (PointId p : parts_[w]) owner_[p] = w;
    }
    for (std::size_t p = 0; p < n_; ++p) {
      parent_[p] = static_cast<PointId>(p);
      if (graph.degree(static_cast<PointId>(p)) >= min_points) core_.set(static_cast<PointId>(p));
    }
    caches_.resize(parts_.size());
  }

  P2pOutput run() {
    local_phase();
    merge_phase();
    auto labels = resolve_phase();
    P2pOutput out;
    out.clustering = make_result(std::move(labels), core_);
    out.metrics = metrics_;
    out.messages = std::move(log_);
    return out;
  }

 private:
  bool local(std::size_t w, PointId x) const { return owner_[x] == w; }

  // Follows parent pointers while they stay on worker w; compresses the
  // walked prefix onto the last local node.
  PointId walk_local(std::size_t w, PointId x) {
    PointId r = x;
    while (parent_[r] != r && local(w, parent_[r])) r = parent_[r];
    while (x != r) {
      const PointId next = parent_[x];
      parent_[x] = r;
      x = next;
    }
    return r;
  }

  void count(const Link& link, PointId origin = 0) {
    ++metrics_.entries_pushed;
    if (options_.record_messages) {
      log_.push_back({link.from, link.to, link.a, link.b, link.hop, link.kind, origin});
    }
  }

  void local_phase() {
    for (std::size_t w = 0; w < parts_.size(); ++w) {
      for (PointId p : parts_[w]) {
        if (!core_.test(p)) continue;
        for (PointId q : graph_.neighbors(p)) {
          if (q == p || !core_.test(q) || !local(w, q)) continue;
          const PointId rp = walk_local(w, p);
          const PointId rq = walk_local(w, q);
          if (rp < rq) parent_[rp] = rq;
          else if (rq < rp) parent_[rq] = rp;
        }
      }
    }
  }

  void send(std::vector<Link>& outbox, Link link) {
    count(link);
    outbox.push_back(link);
  }

  // Processes a union request at the owner of link.b.
  void handle(Link link, std::vector<Link>& outbox) {
    const std::size_t w = link.to;
    PointId a = link.a;
    PointId b = link.b;
    std::size_t hop = link.hop;
    while (true) {
      const PointId r = walk_local(w, b);
      if (parent_[r] != r) {
        const PointId next = parent_[r];
        send(outbox, {w, owner_[next], a, next, hop + 1, MessageKind::forward});
        return;
      }
      if (a == r) return;
      if (a > r) {
        parent_[r] = a;
        return;
      }
      // a < r: a's set must hang below r.
      if (local(w, a)) {
        b = a;
        a = r;
        continue;
      }
      send(outbox, {w, owner_[a], r, a, hop + 1, MessageKind::forward});
      return;
    }
  }

  void merge_phase() {
    std::vector<Link> inbox;
    for (std::size_t w = 0; w < parts_.size(); ++w) {
      for (PointId p : parts_[w]) {
        if (!core_.test(p)) continue;
        for (PointId q : graph_.neighbors(p)) {
          if (!core_.test(q) || local(w, q)) continue;
          send(inbox, {w, owner_[q], walk_local(w, p), q, 0, MessageKind::merge});
        }
      }
    }
    while (!inbox.empty()) {
      RoundMetrics round;
      round.round = ++metrics_.rounds;
      round.entries_pushed = inbox.size();
      metrics_.per_round.push_back(round);
      std::sort(inbox.begin(), inbox.end(), [](const Link& x, const Link& y) {
        return std::tie(x.from, x.a, x.b, x.hop) < std::tie(y.from, y.a, y.b, y.hop);
      });
      std::vector<Link> outbox;
      for (const Link& link : inbox) handle(link, outbox);
      inbox = std::move(outbox);
    }
  }

  // Root of a point owned by another worker, as seen from worker w. The
  // lookup hops owner to owner along the parent chain; the answer travels
  // back the same way so every owner on the path compresses its nodes.
  PointId resolve_remote(std::size_t w, PointId x, PointId origin, std::size_t& depth) {
    auto& cache = caches_[w];
    if (auto it = cache.find(x); it != cache.end()) return it->second;
    std::vector<PointId> path{x};
    std::vector<std::size_t> holders{w, owner_[x]};
    count({w, owner_[x], origin, x, 0, MessageKind::find}, origin);
    PointId cur = x;
    while (parent_[cur] != cur) {
      const PointId next = parent_[cur];
      if (owner_[next] != holders.back()) {
        count({holders.back(), owner_[next], origin, next, holders.size() - 1, MessageKind::find}, origin);
        holders.push_back(owner_[next]);
      }
      path.push_back(next);
      cur = next;
    }
    const PointId root = cur;
    for (std::size_t k = holders.size() - 1; k > 0; --k) {
      count({holders[k], holders[k - 1], origin, root, holders.size() - 1 + (holders.size() - 1 - k),
             MessageKind::reply},
            origin);
    }
    for (PointId node : path) parent_[node] = root;
    depth = std::max(depth, 2 * (holders.size() - 1));
    cache.emplace(x, root);
    return root;
  }

  PointId root_from(std::size_t w, PointId x, std::size_t& depth) {
    if (!local(w, x)) return resolve_remote(w, x, x, depth);
    const PointId exit = walk_local(w, x);
    if (parent_[exit] == exit) return exit;
    return resolve_remote(w, parent_[exit], exit, depth);
  }

  std::vector<Label> resolve_phase() {
    std::vector<Label> labels(n_, kNoise);
    std::size_t depth = 0;
    const std::size_t before = metrics_.entries_pushed;
    for (std::size_t w = 0; w < parts_.size(); ++w) {
      for (PointId p : parts_[w]) {
        if (core_.test(p)) {
          labels[p] = root_from(w, p, depth);
          continue;
        }
        for (PointId q : graph_.neighbors(p)) {
          if (!core_.test(q)) continue;
          const Label root = root_from(w, q, depth);
          if (labels[p] == kNoise || root > labels[p]) labels[p] = root;
        }
      }
    }
    if (metrics_.entries_pushed > before) {
      RoundMetrics round;
      round.round = metrics_.rounds + 1;
      round.entries_pushed = metrics_.entries_pushed - before;
      metrics_.per_round.push_back(round);
      metrics_.rounds += depth;
    }
    return labels;
  }

  const NeighborGraph& graph_;
  std::size_t n_;
  const P2pOptions& options_;
  std::vector<std::vector<PointId>> parts_;
  std::vector<std::size_t> owner_;
  CoreRecord core_;
  std::vector<PointId> parent_;
  std::vector<std::unordered_map<PointId, PointId>> caches_;
  CommMetrics metrics_;
  std::vector<MergeRequest> log_;
};

}  // namespace

P2pOutput run_p2p_dbscan(const NeighborGraph& graph, std::size_t min_points, const P2pOptions& options) {
  return P2pSimulation(graph, min_points, options).run();
}

P2pOutput run_p2p_dbscan(const Dataset& dataset, double eps, std::size_t min_points,
                         const P2pOptions& options) {
  return run_p2p_dbscan(build_neighbor_graph(dataset, eps), min_points, options);
}

}  // namespace psdbscan
