#include "treeprof/sampler.hpp"

#include <algorithm>
#include <string>

#include "treeprof/error.hpp"
#include "treeprof/parallel.hpp"

namespace treeprof {

TreeSample sample_uniform_tree_with_rho(const DegreeSequence& ds, SeededStream& rng) {
  auto d = child_sequence(ds);
  std::shuffle(d.begin(), d.end(), rng);
  Count sum = 0;
  Count best = 0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sum += d[i] - 1;
    if (rho == 0 || sum < best) {
      best = sum;
      rho = i + 1;
    }
  }
  std::rotate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rho), d.end());
  return TreeSample{PlaneTree::from_dfs_degrees(dfs_from_bfs_degrees(d)), static_cast<Count>(rho)};
}

PlaneTree sample_uniform_tree(const DegreeSequence& ds, SeededStream& rng) {
  return sample_uniform_tree_with_rho(ds, rng).tree;
}

namespace {

struct Enumerator {
  std::vector<Count> values;     // distinct child counts
  std::vector<Count> remaining;  // multiplicities left
  std::vector<Count> prefix;
  Count s = 0;
  std::vector<PlaneTree> out;

  void run(Count walk) {
    const auto placed = static_cast<Count>(prefix.size());
    if (placed == s) {
      out.push_back(PlaneTree::from_dfs_degrees(prefix));
      return;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (remaining[k] == 0) continue;
      const Count next = walk + values[k] - 1;
      if (next < 1 && placed + 1 < s) continue;
      --remaining[k];
      prefix.push_back(values[k]);
      run(next);
      prefix.pop_back();
      ++remaining[k];
    }
  }
};

}  // namespace

std::vector<PlaneTree> enumerate_trees(const DegreeSequence& ds, Count max_size) {
  if (ds.size() > max_size)
    throw Error(ErrorCode::SizeTooLarge,
                "enumeration limited to size " + std::to_string(max_size) + ", got " + std::to_string(ds.size()));
  Enumerator e;
  for (auto [i, n] : ds.counts()) {
    e.values.push_back(i);
    e.remaining.push_back(n);
  }
  e.s = ds.size();
  e.run(1);
  return std::move(e.out);
}

boost::multiprecision::cpp_int count_trees(const DegreeSequence& ds) {
  using boost::multiprecision::cpp_int;
  auto factorial = [](Count n) {
    cpp_int f = 1;
    for (Count k = 2; k <= n; ++k) f *= k;
    return f;
  };
  cpp_int denominator = 1;
  for (auto [i, n] : ds.counts()) denominator *= factorial(n);
  return factorial(ds.size() - 1) / denominator;
}

std::vector<double> BatchStats::mean_profile() const {
  std::vector<double> m(profile_sums.size());
  for (std::size_t k = 0; k < m.size(); ++k)
    m[k] = static_cast<double>(profile_sums[k]) / static_cast<double>(replicates);
  return m;
}

BatchStats sample_batch(const DegreeSequence& ds, Count replicates, std::uint64_t master_seed, unsigned threads,
                        std::uint64_t stream_offset) {
  if (replicates < 1) throw Error(ErrorCode::ConfigError, "need at least one replicate");
  struct Replicate {
    std::vector<Count> degrees;
    Profile profile;
    Count rho = 0;
  };
  const bool keep_trees = ds.size() <= kEnumerationLimit;
  std::vector<Replicate> slots(static_cast<std::size_t>(replicates));
  parallel_for(replicates, resolve_threads(threads), [&](Count r) {
    SeededStream rng(master_seed, stream_offset + static_cast<std::uint64_t>(r));
    auto sample = sample_uniform_tree_with_rho(ds, rng);
    auto& slot = slots[r];
    slot.profile = discrete_lamperti(bfw(sample.tree).values);
    slot.rho = sample.rho;
    if (keep_trees) slot.degrees = sample.tree.dfs_degrees();
  });

  BatchStats stats;
  stats.replicates = replicates;
  for (auto& slot : slots) {
    if (keep_trees) ++stats.tree_counts[slot.degrees];
    const auto& z = slot.profile.z;
    if (z.size() > stats.profile_sums.size()) stats.profile_sums.resize(z.size(), 0);
    for (std::size_t k = 0; k < z.size(); ++k) stats.profile_sums[k] += z[k];
    stats.max_heights.push_back(static_cast<Count>(z.size()) - 1);
    stats.rhos.push_back(slot.rho);
  }
  return stats;
}

}  // namespace treeprof
