#include <random>

#include "doctest.h"
#include "psdbscan/disjoint_set.hpp"
#include "psdbscan/types.hpp"

using namespace psdbscan;

TEST_SUITE("dsu") {
  TEST_CASE("find examples") {
    DisjointSet ds(3);
    CHECK(ds.find(2) == 2);
    ds.unite(0, 1);
    CHECK(ds.find(0) == ds.find(1));
  }

  TEST_CASE("chain compresses on find") {
    DisjointSet ds(3);
    ds.unite(0, 1);
    ds.unite(1, 2);
    const PointId root = ds.find(0);
    CHECK(root == 2);
    CHECK(ds.parent(0) == root);
  }

  TEST_CASE("larger id wins") {
    DisjointSet ds(6);
    ds.unite(3, 5);
    CHECK(ds.find(3) == 5);
    CHECK(ds.find(5) == 5);
    ds.unite(5, 3);
    CHECK(ds.find(3) == 5);

    DisjointSet self(4);
    self.unite(2, 2);
    for (PointId i = 0; i < 4; ++i) CHECK(self.parent(i) == i);

    DisjointSet three(3);
    three.unite(0, 1);
    three.unite(1, 2);
    CHECK(three.find(0) == 2);
    CHECK(three.find(1) == 2);
  }

  TEST_CASE("out of range") {
    DisjointSet ds(2);
    CHECK_THROWS_AS(ds.find(2), InputError);
    CHECK_THROWS_AS(ds.unite(0, 5), InputError);
    CHECK_THROWS_AS(ds.parent(9), InputError);
  }

  TEST_CASE("random unions match an equivalence closure oracle") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 200;
      DisjointSet ds(n);
      // Oracle: explicit class ids, relabel on merge.
      std::vector<std::size_t> cls(n);
      for (std::size_t i = 0; i < n; ++i) cls[i] = i;
      const std::size_t ops = rng() % (2 * n);
      for (std::size_t k = 0; k < ops; ++k) {
        const auto a = static_cast<PointId>(rng() % n);
        const auto b = static_cast<PointId>(rng() % n);
        ds.unite(a, b);
        const std::size_t from = cls[a], to = cls[b];
        for (auto& c : cls) {
          if (c == from) c = to;
        }
        if (rng() % 3 == 0) ds.find(static_cast<PointId>(rng() % n));
      }
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        PointId top = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (cls[j] == cls[i]) top = static_cast<PointId>(j);
          ok = ok && ((cls[i] == cls[j]) == ds.same(static_cast<PointId>(i), static_cast<PointId>(j)));
        }
        ok = ok && ds.find(static_cast<PointId>(i)) == top;
        ok = ok && ds.find(ds.find(static_cast<PointId>(i))) == ds.find(static_cast<PointId>(i));
      }
      CHECK(ok);
      // parents are acyclic: every chain ends at a self loop within n steps
      for (std::size_t i = 0; i < n; ++i) {
        PointId x = static_cast<PointId>(i);
        std::size_t steps = 0;
        while (ds.parent(x) != x && steps <= n) {
          x = ds.parent(x);
          ++steps;
        }
        CHECK(steps <= n);
      }
    }
  }
}
