#pragma once

#include <cstdint>
#include <limits>

namespace treeprof {

std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** whose 256-bit state is derived from (master_seed, stream_id)
/// through SplitMix64. Each pair names its own stream; no stream depends on
/// how many numbers another stream has consumed, so replicate `i` of a batch
/// is reproducible regardless of which worker draws it.
class SeededStream {
 public:
  using result_type = std::uint64_t;

  SeededStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

}  // namespace treeprof
