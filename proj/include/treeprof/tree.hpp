#pragma once

#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "treeprof/degseq.hpp"

namespace treeprof {

/// Rooted plane tree stored as the child counts of its vertices in
/// depth-first order. Public vertex ids are 1-based depth-first ranks; the
/// root is vertex 1 and has height 0.
class PlaneTree {
 public:
  /// Throws Error{NotAnExcursion} unless the walk 1 + sum (deg - 1) stays
  /// positive before the last vertex and ends at 0.
  static PlaneTree from_dfs_degrees(std::vector<Count> degrees);

  const std::vector<Count>& dfs_degrees() const { return degrees_; }
  Count size() const { return static_cast<Count>(degrees_.size()); }

  auto operator<=>(const PlaneTree&) const = default;

 private:
  PlaneTree() = default;
  std::vector<Count> degrees_;
};

enum class WalkKind { DFW, BFW, EIBridge };

/// w_0 .. w_s, started at 1.
struct LatticeWalk {
  WalkKind kind = WalkKind::DFW;
  std::vector<Count> values;

  bool operator==(const LatticeWalk&) const = default;
};

LatticeWalk dfw(const PlaneTree& t);
LatticeWalk bfw(const PlaneTree& t);

/// Inverse of dfw. Throws Error{NotAnExcursion}.
PlaneTree tree_from_dfw(std::span<const Count> walk);
/// Inverse of bfw. Throws Error{NotAnExcursion}.
PlaneTree tree_from_bfw(std::span<const Count> walk);

/// Child counts in breadth-first order.
std::vector<Count> bfs_degrees(const PlaneTree& t);
/// Converts breadth-first child counts to depth-first ones (no validation
/// beyond what the walk check in from_dfs_degrees performs).
std::vector<Count> dfs_from_bfs_degrees(std::span<const Count> bfs);

// The following are indexed by 0-based depth-first position.
std::vector<Count> heights(const PlaneTree& t);
std::vector<Count> subtree_sizes(const PlaneTree& t);
/// Parent position, -1 for the root.
std::vector<Count> parents(const PlaneTree& t);

DegreeSequence degree_sequence(const PlaneTree& t);

struct Profile {
  std::vector<Count> z;  // generation sizes
  std::vector<Count> c;  // partial sums of z

  bool operator==(const Profile&) const = default;
};

/// z_0 = 1, c_k = z_0 + ... + z_k, z_{k+1} = x(c_k) until z vanishes.
/// `walk` is a breadth-first walk x_0 .. x_s.
Profile discrete_lamperti(std::span<const Count> walk);
/// Generation sizes counted directly from the heights.
Profile counted_profile(const PlaneTree& t);

/// Number of vertices of the subtree rooted at v whose height lies in
/// [h1, h2]; no h2 means unbounded. Requires height(v) <= h1 <= h2.
/// Throws Error{InvalidVertex} or Error{InvalidRange}.
Count subtree_band_count(const PlaneTree& t, Count v, Count h1, std::optional<Count> h2 = std::nullopt);

/// First height h >= height(v) where the subtree of v holds at least half of
/// its vertices up to h.
Count subtree_half_height(const PlaneTree& t, Count v);
/// First height h after the half height where the band (half+1 .. h) holds at
/// least a quarter of the subtree. Empty when no such height exists.
std::optional<Count> subtree_quarter_height(const PlaneTree& t, Count v);

struct ScaledProfile {
  std::vector<double> t;
  std::vector<double> C;  // c_{floor(t s/b)} / s
  std::vector<double> Z;  // z_{floor(t s/b)} / b
};

/// Samples the rescaled cumulative profile and profile of a tree of size s
/// with scale b on the given times. Beyond the last generation C = 1, Z = 0.
ScaledProfile rescale(const Profile& profile, Count s, double b, std::span<const double> times);

}  // namespace treeprof
