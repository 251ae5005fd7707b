#include <cstdio>
#include <filesystem>

#include "doctest.h"

#include "clusterdev/errors.hpp"
#include "clusterdev/graph_enum.hpp"

using namespace clusterdev;

namespace {
std::uint32_t edge(int i, int j, int n) { return 1u << pair_index(i, j, n); }
}  // namespace

TEST_CASE("connectivity predicates") {
  CHECK(is_connected({1, 0}));
  CHECK(is_connected({3, edge(0, 1, 3) | edge(1, 2, 3)}));
  CHECK_FALSE(is_connected({3, edge(0, 1, 3)}));
  CHECK(is_biconnected({2, edge(0, 1, 2)}));
  CHECK(is_biconnected({3, edge(0, 1, 3) | edge(1, 2, 3) | edge(0, 2, 3)}));
  CHECK_FALSE(is_biconnected({3, edge(0, 1, 3) | edge(1, 2, 3)}));
}

TEST_CASE("labeled graph counts") {
  const std::uint64_t connected[] = {1, 1, 4, 38, 728, 26704};
  const std::uint64_t biconnected[] = {0, 1, 1, 10, 238, 11368};
  for (int n = 2; n <= 6; ++n) {
    CHECK(count_graphs_serial(n, GraphPredicate::connected) == connected[n - 1]);
    CHECK(count_graphs_serial(n, GraphPredicate::biconnected) == biconnected[n - 1]);
    CHECK(enumerate(n, GraphPredicate::biconnected).size() == biconnected[n - 1]);
  }
  CHECK(count_graphs_serial(3, GraphPredicate::all) == 8);
}

TEST_CASE("serial and OpenMP counts agree") {
  for (int n = 2; n <= 6; ++n)
    for (auto p : {GraphPredicate::all, GraphPredicate::connected, GraphPredicate::biconnected})
      CHECK(count_graphs_serial(n, p) == count_graphs_omp(n, p, 3));
}

TEST_CASE("enumeration cap") { CHECK_THROWS_AS(enumerate(8, GraphPredicate::connected), CapacityError); }

TEST_CASE("graph count cache round trip") {
  const auto path = std::filesystem::temp_directory_path() / "clusterdev_graph_cache.txt";
  GraphCountCache c;
  CHECK(c.get(4, GraphPredicate::connected) == 38);
  CHECK(c.get(5, GraphPredicate::biconnected) == 238);
  c.save(path.string());
  GraphCountCache d;
  d.load(path.string());
  CHECK(d.contains(4, GraphPredicate::connected));
  CHECK(d.entries() == c.entries());
  std::filesystem::remove(path);
}

TEST_CASE("hard core table") {
  // For the triangle family, W(h) is -1 only on the full triangle.
  const auto fam = enumerate(3, GraphPredicate::biconnected);
  const auto w = hard_core_table(fam);
  CHECK(w.size() == 8);
  for (std::uint32_t h = 0; h < 8; ++h) CHECK(w[h] == (h == 7 ? -1.0 : 0.0));
}
