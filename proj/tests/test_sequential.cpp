#include <numeric>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "psdbscan/clustering.hpp"

using namespace psdbscan;

TEST_SUITE("sequential-oracle") {
  TEST_CASE("three mutually adjacent points") {
    Dataset d(2, {0, 0, 0.1, 0, 0, 0.1});
    auto r = sequential_dbscan(build_neighbor_graph(d, 1.0), 3);
    CHECK(r.labels == std::vector<Label>{2, 2, 2});
    CHECK(r.num_clusters == 1);
    CHECK(r.core_flags.count() == 3);
  }

  TEST_CASE("isolated point is noise") {
    auto r = sequential_dbscan(build_neighbor_graph(Dataset(1, {0.0}), 1.0), 2);
    CHECK(r.labels == std::vector<Label>{kNoise});
    CHECK(r.num_clusters == 0);
    CHECK(r.num_noise() == 1);
  }

  TEST_CASE("min_points 1 makes every point a core") {
    auto r = sequential_dbscan(build_neighbor_graph(Dataset(1, {0.0, 5.0}), 1.0), 1);
    CHECK(r.labels == std::vector<Label>{0, 1});
    CHECK(r.num_clusters == 2);
  }

  TEST_CASE("worked example converges to 11") {
    auto edges = testutil::worked_example_edges();
    auto r = sequential_dbscan(ingest_linkage(edges, 12), 2);
    CHECK(r.labels == std::vector<Label>(12, 11));
  }

  TEST_CASE("border takes the larger cluster label and never bridges") {
    // cliques {0..3} and {5..8}; 4 touches both, 10 touches only the first,
    // 9 is isolated
    std::vector<std::pair<PointId, PointId>> e{{3, 4}, {4, 5}, {0, 10}};
    for (PointId a = 0; a < 4; ++a) {
      for (PointId b = a + 1; b < 4; ++b) {
        e.emplace_back(a, b);
        e.emplace_back(a + 5, b + 5);
      }
    }
    auto r = sequential_dbscan(ingest_linkage(e, 11), 4);
    CHECK(r.labels == std::vector<Label>{3, 3, 3, 3, 8, 8, 8, 8, 8, kNoise, 3});
    CHECK(r.num_clusters == 2);
    CHECK(!r.core_flags.test(4));
    CHECK(r.core_flags.count() == 8);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(sequential_dbscan(ingest_linkage({}, 2), 0), InputError);
    auto empty = sequential_dbscan(ingest_linkage({}, 0), 3);
    CHECK(empty.labels.empty());
    CHECK(empty.num_clusters == 0);
  }

  TEST_CASE("matches the BFS reference and the noise definition") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      auto inst = testutil::random_instance(rng, 400, 2 + trial % 2);
      auto lists = testutil::naive_lists(inst.dataset, inst.eps);
      auto g = build_neighbor_graph(inst.dataset, inst.eps);
      auto r = sequential_dbscan(g, inst.min_points);
      CHECK(r.labels == testutil::reference_labels(lists, inst.min_points));
      for (PointId p = 0; p < g.size(); ++p) {
        bool touches_core = false;
        for (PointId q : g.neighbors(p)) touches_core = touches_core || r.core_flags.test(q);
        CHECK((r.labels[p] == kNoise) == !touches_core);
      }
    }
  }

  TEST_CASE("cluster partition is independent of id order") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      auto inst = testutil::random_instance(rng, 300, 2);
      const std::size_t n = inst.dataset.size();
      std::vector<PointId> perm(n);
      std::iota(perm.begin(), perm.end(), PointId{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<double> moved(n * 2);
      for (std::size_t i = 0; i < n; ++i) {
        moved[2 * perm[i]] = inst.dataset.point(static_cast<PointId>(i))[0];
        moved[2 * perm[i] + 1] = inst.dataset.point(static_cast<PointId>(i))[1];
      }
      auto a = sequential_dbscan(build_neighbor_graph(inst.dataset, inst.eps), inst.min_points);
      auto b = sequential_dbscan(build_neighbor_graph(Dataset(2, moved), inst.eps), inst.min_points);
      // Same core set and the same core-core equivalence classes; border
      // tie-breaks depend on ids and are not compared.
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        ok = ok && a.core_flags.test(static_cast<PointId>(i)) == b.core_flags.test(perm[i]);
        ok = ok && (a.labels[i] == kNoise) == (b.labels[perm[i]] == kNoise);
      }
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (!a.core_flags.test(static_cast<PointId>(i))) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!a.core_flags.test(static_cast<PointId>(j))) continue;
          ok = ok && ((a.labels[i] == a.labels[j]) == (b.labels[perm[i]] == b.labels[perm[j]]));
        }
      }
      CHECK(ok);
      CHECK(a.num_clusters == b.num_clusters);
    }
  }

  TEST_CASE("linkage graph equals vector graph") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      auto inst = testutil::random_instance(rng, 300, 3);
      auto g = build_neighbor_graph(inst.dataset, inst.eps);
      std::vector<std::pair<PointId, PointId>> edges;
      for (PointId p = 0; p < g.size(); ++p) {
        for (PointId q : g.neighbors(p)) {
          if (p < q) edges.emplace_back(p, q);
        }
      }
      CHECK(sequential_dbscan(ingest_linkage(edges, g.size()), inst.min_points) ==
            sequential_dbscan(g, inst.min_points));
    }
  }
}
