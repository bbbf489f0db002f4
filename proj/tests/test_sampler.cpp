#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "treeprof/error.hpp"
#include "treeprof/sampler.hpp"
#include "treeprof/stats.hpp"

using namespace treeprof;
using V = std::vector<Count>;

TEST_CASE("tree counts") {
  CHECK(count_trees(DegreeSequence::validate({{0, 2}, {2, 1}})) == 1);
  CHECK(count_trees(DegreeSequence::validate({{0, 3}, {1, 1}, {3, 1}})) == 4);
  CHECK(count_trees(DegreeSequence::validate({{0, 1}})) == 1);
  CHECK(count_trees(gen_kary(1, 7)) == 1);
  // Fuss-Catalan: binomial(kn, n) / ((k-1) n + 1)
  CHECK(count_trees(gen_kary(2, 10)) == 16796);
  CHECK(count_trees(gen_kary(3, 5)) == 273);
}

TEST_CASE("enumeration matches the count for every degree sequence up to size 10") {
  for (Count s = 1; s <= 10; ++s)
    for (const auto& ds : all_degree_sequences(s)) {
      const auto trees = enumerate_trees(ds);
      CHECK(boost::multiprecision::cpp_int(trees.size()) == count_trees(ds));
      CHECK(std::is_sorted(trees.begin(), trees.end()));
      CHECK(std::adjacent_find(trees.begin(), trees.end()) == trees.end());
      for (const auto& t : trees) CHECK(degree_sequence(t) == ds);
    }
  CHECK_THROWS_AS(enumerate_trees(gen_kary(2, 10)), Error);
}

TEST_CASE("single-tree classes are sampled deterministically") {
  SeededStream rng(1, 0);
  for (int r = 0; r < 20; ++r) {
    CHECK(sample_uniform_tree(DegreeSequence::validate({{0, 2}, {2, 1}}), rng).dfs_degrees() == V{2, 0, 0});
    CHECK(sample_uniform_tree(gen_kary(1, 5), rng).dfs_degrees() == V{1, 1, 1, 1, 1, 0});
  }
}

TEST_CASE("sampled trees have the requested degree sequence and a valid walk") {
  SeededStream rng(2, 0);
  const auto ds = DegreeSequence::validate({{0, 271}, {1, 50}, {3, 133}, {5, 1}});
  for (int r = 0; r < 50; ++r) {
    const auto t = sample_uniform_tree(ds, rng);
    CHECK(degree_sequence(t) == ds);
    const auto w = bfw(t).values;
    CHECK(w.front() == 1);
    CHECK(w.back() == 0);
    CHECK(std::all_of(w.begin(), w.end() - 1, [](Count x) { return x > 0; }));
  }
}

TEST_CASE("uniformity on every degree sequence up to size 8") {
  std::vector<DegreeSequence> family;
  for (Count s = 2; s <= 8; ++s)
    for (const auto& ds : all_degree_sequences(s))
      if (count_trees(ds) > 1) family.push_back(ds);
  // family-wise level 1e-3 over all sequences
  const double level = 1e-3 / static_cast<double>(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto trees = enumerate_trees(family[i]);
    const auto batch = sample_batch(family[i], 100000, 1000 + i);
    std::vector<std::int64_t> observed;
    for (const auto& t : trees) {
      const auto it = batch.tree_counts.find(t.dfs_degrees());
      observed.push_back(it == batch.tree_counts.end() ? 0 : it->second);
    }
    const std::vector<double> uniform(trees.size(), 1.0 / static_cast<double>(trees.size()));
    const auto test = stats::chi_square_gof(observed, uniform);
    INFO("size ", family[i].size(), " trees ", trees.size(), " p ", test.p_value);
    CHECK(test.p_value > level);
  }
}

TEST_CASE("first-minimum index is uniform") {
  const auto ds = DegreeSequence::validate({{0, 3}, {1, 2}, {3, 1}});
  SeededStream rng(4, 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(ds.size()), 0);
  for (int r = 0; r < 70000; ++r) {
    const auto sample = sample_uniform_tree_with_rho(ds, rng);
    REQUIRE(sample.rho >= 1);
    REQUIRE(sample.rho <= ds.size());
    ++counts[static_cast<std::size_t>(sample.rho - 1)];
  }
  const std::vector<double> uniform(counts.size(), 1.0 / static_cast<double>(counts.size()));
  CHECK(stats::chi_square_gof(counts, uniform).p_value > 1e-3);
}

TEST_CASE("batches are reproducible and independent of the thread count") {
  const auto ds = DegreeSequence::validate({{0, 3}, {1, 1}, {3, 1}});
  const auto a = sample_batch(ds, 5000, 77, 1);
  const auto b = sample_batch(ds, 5000, 77, 4);
  CHECK(a == b);
  CHECK(a == sample_batch(ds, 5000, 77, 1));
  CHECK(!(a == sample_batch(ds, 5000, 78, 1)));

  const auto one = sample_batch(ds, 1, 9, 1);
  SeededStream rng(9, 0);
  const auto t = sample_uniform_tree(ds, rng);
  CHECK(one.replicates == 1);
  CHECK(one.tree_counts.size() == 1);
  CHECK(one.tree_counts.begin()->first == t.dfs_degrees());
  CHECK(one.profile_sums == counted_profile(t).z);
  const auto mean = one.mean_profile();
  for (std::size_t k = 0; k < mean.size(); ++k) CHECK(mean[k] == static_cast<double>(one.profile_sums[k]));
}
