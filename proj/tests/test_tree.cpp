#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treeprof/error.hpp"
#include "treeprof/sampler.hpp"
#include "treeprof/tree.hpp"

using namespace treeprof;
using V = std::vector<Count>;

namespace {

PlaneTree figure_one() { return PlaneTree::from_dfs_degrees({3, 2, 0, 0, 0, 1, 2, 1, 0, 0}); }

// every plane tree with s vertices
std::vector<PlaneTree> all_trees(Count s) {
  std::vector<PlaneTree> out;
  for (const auto& ds : all_degree_sequences(s)) {
    auto trees = enumerate_trees(ds);
    out.insert(out.end(), trees.begin(), trees.end());
  }
  return out;
}

}  // namespace

TEST_CASE("figure-one walks") {
  const auto t = figure_one();
  CHECK(dfw(t).values == V{1, 3, 4, 3, 2, 1, 1, 2, 2, 1, 0});
  CHECK(bfw(t).values == V{1, 3, 4, 3, 3, 2, 1, 2, 2, 1, 0});
  CHECK(tree_from_dfw(V{1, 3, 4, 3, 2, 1, 1, 2, 2, 1, 0}) == t);
  CHECK(tree_from_bfw(V{1, 3, 4, 3, 3, 2, 1, 2, 2, 1, 0}) == t);
  CHECK(degree_sequence(t) == DegreeSequence::validate({{0, 5}, {1, 2}, {2, 2}, {3, 1}}));
  CHECK(heights(t) == V{0, 1, 2, 2, 1, 1, 2, 3, 4, 3});
}

TEST_CASE("small walks") {
  CHECK(tree_from_dfw(V{1, 0}).dfs_degrees() == V{0});
  CHECK(tree_from_dfw(V{1, 2, 1, 0}).dfs_degrees() == V{2, 0, 0});
  const auto path = PlaneTree::from_dfs_degrees({1, 1, 0});
  CHECK(dfw(path).values == V{1, 1, 1, 0});
  CHECK(bfw(path).values == V{1, 1, 1, 0});
  const auto single = PlaneTree::from_dfs_degrees({0});
  CHECK(dfw(single).values == V{1, 0});
  CHECK(bfw(single).values == V{1, 0});
}

TEST_CASE("invalid walks are rejected") {
  CHECK_THROWS_AS(PlaneTree::from_dfs_degrees({0, 0}), Error);
  CHECK_THROWS_AS(PlaneTree::from_dfs_degrees({}), Error);
  CHECK_THROWS_AS(PlaneTree::from_dfs_degrees({2, 0}), Error);
  CHECK_THROWS_AS(tree_from_dfw(V{1, 2, 0, 1, 0}), Error);
  CHECK_THROWS_AS(tree_from_bfw(V{0}), Error);
}

TEST_CASE("exhaustive walk bijections up to size 8") {
  Count cases = 0;
  for (Count s = 1; s <= 8; ++s) {
    for (const auto& t : all_trees(s)) {
      const auto d = dfw(t);
      const auto b = bfw(t);
      CHECK(tree_from_dfw(d.values) == t);
      CHECK(tree_from_bfw(b.values) == t);
      CHECK(dfw(tree_from_dfw(d.values)).values == d.values);
      auto inc_d = d.values;
      auto inc_b = b.values;
      std::adjacent_difference(inc_d.begin(), inc_d.end(), inc_d.begin());
      std::adjacent_difference(inc_b.begin(), inc_b.end(), inc_b.begin());
      std::sort(inc_d.begin() + 1, inc_d.end());
      std::sort(inc_b.begin() + 1, inc_b.end());
      CHECK(inc_d == inc_b);
      CHECK(dfs_from_bfs_degrees(bfs_degrees(t)) == t.dfs_degrees());
      ++cases;
    }
  }
  // Catalan numbers C_0 .. C_7
  CHECK(cases == 1 + 1 + 2 + 5 + 14 + 42 + 132 + 429);
}

TEST_CASE("discrete Lamperti recursion") {
  const auto p = discrete_lamperti(V{1, 3, 4, 3, 3, 2, 1, 2, 2, 1, 0});
  CHECK(p.z == V{1, 3, 3, 2, 1});
  CHECK(p.c == V{1, 4, 7, 9, 10});
  CHECK(discrete_lamperti(V{1, 0}) == Profile{{1}, {1}});
  CHECK(discrete_lamperti(V{1, 1, 1, 0}) == Profile{{1, 1, 1}, {1, 2, 3}});
}

TEST_CASE("Lamperti equals counted profile, exhaustive up to size 8") {
  for (Count s = 1; s <= 8; ++s)
    for (const auto& t : all_trees(s)) {
      const auto p = discrete_lamperti(bfw(t).values);
      CHECK(p == counted_profile(t));
      Count sum = 0;
      for (Count z : p.z) sum += z;
      CHECK(sum == s);
      CHECK(std::is_sorted(p.c.begin(), p.c.end(), std::less_equal<>()));
    }
}

TEST_CASE("Lamperti equals counted profile on large random trees") {
  SeededStream rng(3, 0);
  for (Count k : {2, 3, 7}) {
    const auto t = sample_uniform_tree(gen_kary(k, 20000), rng);
    CHECK(discrete_lamperti(bfw(t).values) == counted_profile(t));
  }
}

TEST_CASE("subtree statistics on figure one") {
  const auto t = figure_one();
  CHECK(subtree_band_count(t, 6, 1, 2) == 2);
  CHECK(subtree_band_count(t, 1, 0) == 10);
  CHECK(subtree_half_height(t, 7) == 3);
  CHECK(subtree_quarter_height(t, 7) == 4);
  CHECK(subtree_sizes(t) == V{10, 3, 1, 1, 1, 5, 4, 2, 1, 1});
  CHECK(parents(t) == V{-1, 0, 1, 1, 0, 0, 5, 6, 7, 6});
  CHECK_THROWS_AS(subtree_band_count(t, 11, 0), Error);
  CHECK_THROWS_AS(subtree_band_count(t, 6, 0, 2), Error);
  CHECK_THROWS_AS(subtree_band_count(t, 6, 3, 2), Error);
}

TEST_CASE("band counts agree with a direct count") {
  SeededStream rng(8, 0);
  const auto t = sample_uniform_tree(gen_kary(3, 200), rng);
  const auto h = heights(t);
  const auto sizes = subtree_sizes(t);
  for (Count v = 1; v <= t.size(); v += 17) {
    const Count i = v - 1;
    for (Count h1 = h[i]; h1 <= h[i] + 4; ++h1) {
      Count direct = 0;
      for (Count j = i; j < i + sizes[i]; ++j) direct += h[j] >= h1 && h[j] <= h1 + 2;
      CHECK(subtree_band_count(t, v, h1, h1 + 2) == direct);
    }
  }
}

TEST_CASE("rescaled profile") {
  const Profile p{{1, 3, 3, 2, 1}, {1, 4, 7, 9, 10}};
  const double b = std::sqrt(10.0);
  const std::vector<double> times{0.0, b / 10.0, 2.5 * b / 10.0, 100.0};
  const auto r = rescale(p, 10, b, times);
  CHECK(r.C[0] == doctest::Approx(0.1));
  CHECK(r.C[1] == doctest::Approx(0.4));
  CHECK(r.C[2] == doctest::Approx(0.7));
  CHECK(r.C[3] == 1.0);
  CHECK(r.Z[0] == doctest::Approx(1.0 / b));
  CHECK(r.Z[3] == 0.0);
  CHECK(*std::max_element(r.C.begin(), r.C.end()) == 1.0);
  const std::vector<double> unit{0.0, 1.0, 2.0};
  const auto id = rescale(p, 10, 10.0, unit);
  CHECK(id.Z == std::vector<double>{0.1, 0.3, 0.3});
}
