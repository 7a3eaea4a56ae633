#include <doctest.h>

#include <set>

#include "graphdiff/community.hpp"
#include "graphdiff/errors.hpp"
#include "graphdiff/graph.hpp"

using namespace graphdiff;

TEST_CASE("block index map examples") {
  CHECK(block_index_map(1).dimension() == 1);
  CHECK(block_index_map(1)(0, 0) == 0);
  const auto m2 = block_index_map(2);
  CHECK(m2.dimension() == 3);
  CHECK(m2(0, 0) == 0);
  CHECK(m2(0, 1) == 1);
  CHECK(m2(1, 0) == 1);
  CHECK(m2(1, 1) == 2);
  CHECK(block_index_map(4).dimension() == 10);
}

TEST_CASE("block index map is a symmetric bijection for K <= 12") {
  for (std::size_t k = 1; k <= 12; ++k) {
    const auto m = block_index_map(k);
    std::set<std::size_t> image;
    std::size_t expected = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) {
        CHECK(m(i, j) == m(j, i));
        CHECK(m(i, j) == expected++);  // lexicographic
        image.insert(m(i, j));
      }
    CHECK(image.size() == k * (k + 1) / 2);
  }
}

TEST_CASE("partition validation") {
  CHECK_THROWS(CommunityPartition({0, 0, 0}, 2));
  CHECK_THROWS(CommunityPartition({0, 2}, 2));
  const auto p = CommunityPartition::from_sizes({2, 3});
  CHECK(p.sizes() == std::vector<std::size_t>{2, 3});
  CHECK(p.community_of(4) == 1);
  const auto back = partition_from_json(partition_to_json(p));
  CHECK(back.assignment() == p.assignment());
  CHECK(partition_to_json(p)["assignment"][0] == 1);
}

WeightedGraph cliques_joined() {
  std::vector<WeightedGraph::Edge> e;
  for (std::size_t base : {0, 5})
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) e.push_back({base + i, base + j, 1.0});
  e.push_back({4, 5, 1.0});
  return WeightedGraph::from_edges(10, e);
}

TEST_CASE("fluid communities recover two cliques") {
  const auto g = cliques_joined();
  int ok = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = fluid_communities(g, 2, s).partition.assignment();
    bool planted = true;
    for (std::size_t i = 0; i < 10; ++i) planted = planted && ((a[i] == a[0]) == (i < 5));
    ok += planted;
  }
  CHECK(ok >= 95);
}

TEST_CASE("fluid communities edge cases") {
  const auto g = cliques_joined();
  const auto singletons = fluid_communities(g, 10, 3).partition;
  for (auto s : singletons.sizes()) CHECK(s == 1);
  CHECK_THROWS_AS(fluid_communities(g, 11, 3), DomainError);
  const auto split = generate_sbm({{3, 3}, 1.0, 0.0, 1.0}, 1);
  CHECK_THROWS(fluid_communities(split, 2, 1));
}

TEST_CASE("fluid communities always valid and deterministic") {
  const auto r = read_edge_list_file(GRAPHDIFF_SOURCE_DIR "/tests/data/fixture_50.txt");
  for (std::size_t k = 1; k <= 6; ++k)
    for (std::uint64_t s = 0; s < 5; ++s) {
      FluidOptions opt;
      opt.max_iter = 2;  // force early stops too
      const auto a = fluid_communities(r.graph, k, s, opt);
      CHECK(a.partition.k() == k);
      for (auto sz : a.partition.sizes()) CHECK(sz > 0);
      CHECK(fluid_communities(r.graph, k, s, opt).partition.assignment() == a.partition.assignment());
    }
}
