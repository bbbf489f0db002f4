#pragma once

#include <span>
#include <vector>

#include "treeprof/tree.hpp"

namespace treeprof {

template <class T>
struct VervaatResult {
  std::vector<T> increments;  // x_{rho+1}, ..., x_s, x_1, ..., x_rho
  Count rho = 0;              // in [1, s]
};

/// Cyclic shift of the increments at the first index rho in [1, s] where the
/// partial sums attain their minimum. For an integer bridge ending at -1 the
/// output, started at 1, is a breadth-first (or depth-first) walk.
template <class T>
VervaatResult<T> discrete_vervaat(std::span<const T> increments) {
  VervaatResult<T> out;
  const auto s = increments.size();
  if (s == 0) return out;
  T sum{};
  T best{};
  std::size_t rho = 0;
  for (std::size_t i = 0; i < s; ++i) {
    sum += increments[i];
    if (rho == 0 || sum < best) {
      best = sum;
      rho = i + 1;
    }
  }
  out.rho = static_cast<Count>(rho);
  out.increments.reserve(s);
  out.increments.insert(out.increments.end(), increments.begin() + static_cast<std::ptrdiff_t>(rho), increments.end());
  out.increments.insert(out.increments.end(), increments.begin(), increments.begin() + static_cast<std::ptrdiff_t>(rho));
  return out;
}

/// Partial sums of the increments, started at `start`.
template <class T>
std::vector<T> walk_from(std::span<const T> increments, T start) {
  std::vector<T> w(increments.size() + 1);
  w[0] = start;
  for (std::size_t i = 0; i < increments.size(); ++i) w[i + 1] = w[i] + increments[i];
  return w;
}

/// Regrafting at a deep vertex and one of its strict ancestors (1-based):
/// the subtree of the ancestor pruned at the deep vertex becomes the top,
/// the rest of the tree hangs where the deep vertex was, and the subtree of
/// the deep vertex hangs where the ancestor was. The deep vertex keeps its
/// depth-first index and its height.
/// Throws Error{InvalidVertex} if `ancestor` is not a strict ancestor of `deep`.
PlaneTree graft_213(const PlaneTree& t, Count deep, Count ancestor);

/// The 213 transformation at v with distance h >= 1: identity when
/// height(v) <= h, otherwise graft_213 with the ancestor of v at distance h.
/// Throws Error{InvalidVertex} or Error{InvalidRange} (h < 1).
PlaneTree transform_213(const PlaneTree& t, Count v, Count h);

/// Inverse of transform_213(., v, h): grafts with the ancestor at distance
/// height(v) - h, which is where the old root sits after the transformation.
PlaneTree inverse_213(const PlaneTree& t, Count v, Count h);

/// Five-case increment rearrangement of a depth-first walk (values w_0..w_s)
/// for a deep vertex u and its ancestor v, 1-based.
LatticeWalk psi_walk(std::span<const Count> walk, Count u, Count v);

/// Real-valued walk, values[0] = 0.
struct RealWalk {
  std::vector<double> values;

  std::vector<double> increments() const;
  bool operator==(const RealWalk&) const = default;
};

RealWalk real_walk(std::span<const double> increments);

/// min_{j >= i} w_j
std::vector<double> future_minimum(std::span<const double> w);
/// max_{j <= i} w_j
std::vector<double> running_max(std::span<const double> w);
/// min{s >= t : w_s = running max at s}; -1 if the walk never returns to its
/// running maximum after t.
Count straddle_d(std::span<const double> w, Count t);

/// Times 0 = I_0 < ... < I_K where the walk equals its running maximum.
/// Excursion j occupies the increments I_{j-1}+1 .. I_j; increments after
/// I_K form the incomplete tail.
struct ExcursionDecomposition {
  std::vector<Count> boundaries;
  Count excursions() const { return static_cast<Count>(boundaries.size()) - 1; }
};

ExcursionDecomposition excursion_decompose(std::span<const double> w);

/// Block i of the result is block sigma[i] of w. The tail stays in place.
/// Throws Error{PermutationSizeMismatch}.
RealWalk excursion_permute(const RealWalk& w, std::span<const Count> sigma);

/// Time reversal w_n - w_{n-j}, then reversal of the order of its complete
/// excursions below the running maximum.
/// Throws Error{TiedExtremum} unless the minimum and the maximum of w are
/// attained once.
RealWalk future_min_transform(const RealWalk& w);

/// F_{rho+j} - F_rho for j = 0..n-rho, F the future minimum, rho the argmin.
std::vector<double> post_min_future_min_path(std::span<const double> w);
/// running_max(w)[d(j)] for j = 0..eta, eta the argmax.
std::vector<double> max_at_d_path(std::span<const double> w);

}  // namespace treeprof
