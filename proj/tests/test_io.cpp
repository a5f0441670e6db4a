#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "psdbscan/io.hpp"

using namespace psdbscan;

namespace {
Dataset vec(const std::string& text) {
  std::istringstream in(text);
  return parse_vector(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    vec(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}
}  // namespace

TEST_SUITE("cli-io") {
  TEST_CASE("parse_vector") {
    auto d = vec("0,1.0,2.0\n1,3.0,4.0");
    CHECK(d.size() == 2);
    CHECK(d.dim() == 2);
    CHECK(d.point(1)[0] == 3.0);
    // rows in any order, blank lines and CRLF tolerated
    auto shuffled = vec("1, 3.0 ,4.0\r\n\n0,1.0,2.0\r\n");
    CHECK(shuffled == d);
    CHECK(vec("").size() == 0);
  }

  TEST_CASE("parse_vector errors carry line numbers") {
    CHECK(parse_error_line("0,1,2\n1,3") == 2);               // ragged
    CHECK(parse_error_line("0,1,2\n1,3,x") == 2);             // non-numeric
    CHECK(parse_error_line("0,1,2\n1,3,nan") == 2);           // non-finite
    CHECK(parse_error_line("0,1,2\n1,3,4\n1,5,6") == 3);      // duplicate
    CHECK(parse_error_line("0\n") == 1);                      // no coordinates
    CHECK(parse_error_line("-1,0\n") == 1);
    try {
      vec("0,1\n0,2\n");
      FAIL("expected duplicate error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("duplicate id 0") != std::string::npos);
    }
    CHECK_THROWS_AS(vec("0,1\n2,2\n"), InputError);  // missing id 1
  }

  TEST_CASE("parse_linkage") {
    std::istringstream path("0,1\n1,2\n");
    CHECK(parse_linkage(path, 3).to_lists() == std::vector<std::vector<PointId>>{{0, 1}, {0, 1, 2}, {1, 2}});
    std::istringstream out_of_range("0,7\n");
    CHECK_THROWS_AS(parse_linkage(out_of_range, 3), InputError);
    std::istringstream empty("");
    CHECK(parse_linkage(empty, 5).size() == 5);
    std::istringstream inferred("0,4\n");
    CHECK(parse_linkage(inferred, std::nullopt).size() == 5);
    std::istringstream bad("0,1,2\n");
    CHECK_THROWS_AS(parse_linkage(bad, 3), ParseError);
    std::istringstream word("a,1\n");
    CHECK_THROWS_AS(parse_linkage(word, 3), ParseError);
    CHECK_THROWS_AS(parse_linkage_file("/nonexistent/file.csv", 3), InputError);
  }

  TEST_CASE("write_labels") {
    ClusteringResult two{{1, 1}, 1, CoreRecord(2)};
    std::ostringstream a;
    write_labels(a, two);
    CHECK(a.str() == "id,label\n0,1\n1,1\n");

    ClusteringResult noisy{{kNoise}, 0, CoreRecord(1)};
    std::ostringstream b;
    write_labels(b, noisy);
    CHECK(b.str() == "id,label\n0,-1\n");

    std::ostringstream c;
    write_labels(c, ClusteringResult{});
    CHECK(c.str() == "id,label\n");
  }

  TEST_CASE("labels round trip") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      auto inst = testutil::random_instance(rng, 300, 2);
      auto r = sequential_dbscan(build_neighbor_graph(inst.dataset, inst.eps), inst.min_points);
      auto path = testutil::temp_path("labels_" + std::to_string(trial) + ".csv");
      write_labels(path.string(), r);
      std::istringstream in(testutil::read_file(path));
      CHECK(read_labels(in) == r.labels);
    }
    std::istringstream headerless("0,3\n1,-1\n");
    CHECK(read_labels(headerless) == std::vector<Label>{3, kNoise});
    std::istringstream gap("0,3\n2,3\n");
    CHECK_THROWS_AS(read_labels(gap), ParseError);
  }

  TEST_CASE("vector round trip is exact") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      auto inst = testutil::random_instance(rng, 200, 3);
      std::stringstream s;
      write_vector(s, inst.dataset);
      CHECK(parse_vector(s) == inst.dataset);
    }
  }
}
