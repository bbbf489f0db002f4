#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <vector>

#include "treeprof/degseq.hpp"
#include "treeprof/rng.hpp"
#include "treeprof/tree.hpp"

namespace treeprof {

struct TreeSample {
  PlaneTree tree;
  Count rho = 0;  // first-minimum index of the shuffled bridge, in [1, s]
};

/// Shuffles the child sequence, rotates the bridge of (d - 1) at its first
/// minimum and reads the result as breadth-first child counts. Uniform over
/// the plane trees with degree sequence ds.
TreeSample sample_uniform_tree_with_rho(const DegreeSequence& ds, SeededStream& rng);
PlaneTree sample_uniform_tree(const DegreeSequence& ds, SeededStream& rng);

inline constexpr Count kEnumerationLimit = 12;

/// All plane trees with degree sequence ds, in lexicographic order of their
/// depth-first child counts. Throws Error{SizeTooLarge} above `max_size`.
std::vector<PlaneTree> enumerate_trees(const DegreeSequence& ds, Count max_size = kEnumerationLimit);

/// (s - 1)! / prod_i N_i!
boost::multiprecision::cpp_int count_trees(const DegreeSequence& ds);

/// Per-replicate data of a batch, merged in stream order.
struct BatchStats {
  Count replicates = 0;
  /// Depth-first child counts -> frequency; filled only for s <= kEnumerationLimit.
  std::map<std::vector<Count>, Count> tree_counts;
  /// sum over replicates of z_k
  std::vector<Count> profile_sums;
  std::vector<Count> max_heights;
  std::vector<Count> rhos;

  std::vector<double> mean_profile() const;
  bool operator==(const BatchStats&) const = default;
};

/// Replicate r uses the stream (master_seed, stream_offset + r).
BatchStats sample_batch(const DegreeSequence& ds, Count replicates, std::uint64_t master_seed, unsigned threads = 0,
                        std::uint64_t stream_offset = 0);

}  // namespace treeprof
