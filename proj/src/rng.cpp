#include "treeprof/rng.hpp"

namespace treeprof {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SeededStream::SeededStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  std::uint64_t a = master_seed;
  std::uint64_t b = stream_id ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t mix = splitmix64(a) ^ rotl(splitmix64(b), 17);
  for (auto& word : state_) word = splitmix64(mix);
  // all-zero state is the one fixed point of xoshiro
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

SeededStream::result_type SeededStream::operator()() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededStream::uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

}  // namespace treeprof
