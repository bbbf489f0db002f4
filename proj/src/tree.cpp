#include "treeprof/tree.hpp"

#include <cmath>
#include <string>

#include "treeprof/error.hpp"

namespace treeprof {

namespace {

void check_excursion(std::span<const Count> degrees) {
  if (degrees.empty()) throw Error(ErrorCode::NotAnExcursion, "empty tree");
  Count w = 1;
  const auto s = degrees.size();
  for (std::size_t i = 0; i < s; ++i) {
    if (degrees[i] < 0) throw Error(ErrorCode::NotAnExcursion, "negative child count");
    w += degrees[i] - 1;
    if (i + 1 < s && w < 1)
      throw Error(ErrorCode::NotAnExcursion, "walk reaches 0 at step " + std::to_string(i + 1) + " of " +
                                                 std::to_string(s));
  }
  if (w != 0) throw Error(ErrorCode::NotAnExcursion, "walk ends at " + std::to_string(w) + ", expected 0");
}

std::vector<Count> degrees_of_walk(std::span<const Count> walk) {
  if (walk.size() < 2 || walk.front() != 1)
    throw Error(ErrorCode::NotAnExcursion, "walk must start at 1 and have at least one step");
  std::vector<Count> d(walk.size() - 1);
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) d[i] = walk[i + 1] - walk[i] + 1;
  return d;
}

LatticeWalk walk_of(std::span<const Count> degrees, WalkKind kind) {
  LatticeWalk w{kind, {}};
  w.values.resize(degrees.size() + 1);
  w.values[0] = 1;
  for (std::size_t i = 0; i < degrees.size(); ++i) w.values[i + 1] = w.values[i] + degrees[i] - 1;
  return w;
}

void check_vertex(const PlaneTree& t, Count v) {
  if (v < 1 || v > t.size())
    throw Error(ErrorCode::InvalidVertex, "vertex " + std::to_string(v) + " outside 1.." + std::to_string(t.size()));
}

}  // namespace

PlaneTree PlaneTree::from_dfs_degrees(std::vector<Count> degrees) {
  check_excursion(degrees);
  PlaneTree t;
  t.degrees_ = std::move(degrees);
  return t;
}

LatticeWalk dfw(const PlaneTree& t) { return walk_of(t.dfs_degrees(), WalkKind::DFW); }

LatticeWalk bfw(const PlaneTree& t) { return walk_of(bfs_degrees(t), WalkKind::BFW); }

PlaneTree tree_from_dfw(std::span<const Count> walk) { return PlaneTree::from_dfs_degrees(degrees_of_walk(walk)); }

PlaneTree tree_from_bfw(std::span<const Count> walk) {
  const auto bfs = degrees_of_walk(walk);
  check_excursion(bfs);
  return PlaneTree::from_dfs_degrees(dfs_from_bfs_degrees(bfs));
}

std::vector<Count> subtree_sizes(const PlaneTree& t) {
  const auto& d = t.dfs_degrees();
  std::vector<Count> size(d.size());
  std::vector<Count> pending;  // sizes of completed subtrees to the right, nearest on top
  for (std::size_t i = d.size(); i-- > 0;) {
    Count total = 1;
    for (Count k = 0; k < d[i]; ++k) {
      total += pending.back();
      pending.pop_back();
    }
    size[i] = total;
    pending.push_back(total);
  }
  return size;
}

std::vector<Count> heights(const PlaneTree& t) {
  const auto& d = t.dfs_degrees();
  std::vector<Count> h(d.size());
  std::vector<Count> open;  // children still to visit, per ancestor
  for (std::size_t i = 0; i < d.size(); ++i) {
    while (!open.empty() && open.back() == 0) open.pop_back();
    h[i] = static_cast<Count>(open.size());
    if (!open.empty()) --open.back();
    open.push_back(d[i]);
  }
  return h;
}

std::vector<Count> parents(const PlaneTree& t) {
  const auto& d = t.dfs_degrees();
  std::vector<Count> parent(d.size(), -1);
  std::vector<std::pair<Count, Count>> open;  // (position, children left)
  for (std::size_t i = 0; i < d.size(); ++i) {
    while (!open.empty() && open.back().second == 0) open.pop_back();
    if (!open.empty()) {
      parent[i] = open.back().first;
      --open.back().second;
    }
    open.emplace_back(static_cast<Count>(i), d[i]);
  }
  return parent;
}

std::vector<Count> bfs_degrees(const PlaneTree& t) {
  const auto& d = t.dfs_degrees();
  const auto size = subtree_sizes(t);
  std::vector<Count> out;
  out.reserve(d.size());
  std::vector<Count> queue{0};
  queue.reserve(d.size());
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Count v = queue[head];
    out.push_back(d[v]);
    Count child = v + 1;
    for (Count k = 0; k < d[v]; ++k) {
      queue.push_back(child);
      child += size[child];
    }
  }
  return out;
}

std::vector<Count> dfs_from_bfs_degrees(std::span<const Count> bfs) {
  const auto s = bfs.size();
  std::vector<Count> first_child(s);
  Count next = 1;
  for (std::size_t i = 0; i < s; ++i) {
    first_child[i] = next;
    next += bfs[i];
  }
  std::vector<Count> out;
  out.reserve(s);
  std::vector<Count> stack{0};
  while (!stack.empty()) {
    const Count v = stack.back();
    stack.pop_back();
    out.push_back(bfs[v]);
    for (Count k = bfs[v]; k-- > 0;) stack.push_back(first_child[v] + k);
  }
  return out;
}

DegreeSequence degree_sequence(const PlaneTree& t) { return degree_sequence_of(t.dfs_degrees()); }

Profile discrete_lamperti(std::span<const Count> walk) {
  if (walk.empty() || walk.front() != 1) throw Error(ErrorCode::NotAnExcursion, "breadth-first walk must start at 1");
  Profile p;
  p.z.push_back(1);
  p.c.push_back(1);
  const auto last = static_cast<Count>(walk.size()) - 1;
  for (;;) {
    const Count c = p.c.back();
    if (c > last) throw Error(ErrorCode::NotAnExcursion, "cumulative profile passes the end of the walk");
    const Count z = walk[c];
    if (z <= 0) break;
    p.z.push_back(z);
    p.c.push_back(c + z);
  }
  return p;
}

Profile counted_profile(const PlaneTree& t) {
  Profile p;
  for (Count h : heights(t)) {
    if (h >= static_cast<Count>(p.z.size())) p.z.resize(h + 1, 0);
    ++p.z[h];
  }
  p.c.resize(p.z.size());
  Count acc = 0;
  for (std::size_t k = 0; k < p.z.size(); ++k) p.c[k] = acc += p.z[k];
  return p;
}

namespace {

// Generation sizes of the subtree of v, indexed from height(v).
std::vector<Count> subtree_generations(const PlaneTree& t, Count v, Count& base_height) {
  check_vertex(t, v);
  const auto h = heights(t);
  const auto size = subtree_sizes(t);
  const auto root = v - 1;
  base_height = h[root];
  std::vector<Count> z;
  for (Count i = root; i < root + size[root]; ++i) {
    const auto k = h[i] - base_height;
    if (k >= static_cast<Count>(z.size())) z.resize(k + 1, 0);
    ++z[k];
  }
  return z;
}

}  // namespace

Count subtree_band_count(const PlaneTree& t, Count v, Count h1, std::optional<Count> h2) {
  Count base = 0;
  const auto z = subtree_generations(t, v, base);
  if (h1 < base || (h2 && *h2 < h1))
    throw Error(ErrorCode::InvalidRange, "need height(v) <= h1 <= h2");
  Count total = 0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Count h = base + static_cast<Count>(k);
    if (h >= h1 && (!h2 || h <= *h2)) total += z[k];
  }
  return total;
}

namespace {

// Twice the count compared with the size avoids rounding for odd sizes.
Count half_height_of(const std::vector<Count>& z, Count base, Count size) {
  Count acc = 0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    acc += z[k];
    if (2 * acc >= size) return base + static_cast<Count>(k);
  }
  return base + static_cast<Count>(z.size()) - 1;
}

}  // namespace

Count subtree_half_height(const PlaneTree& t, Count v) {
  Count base = 0;
  const auto z = subtree_generations(t, v, base);
  return half_height_of(z, base, subtree_sizes(t)[v - 1]);
}

std::optional<Count> subtree_quarter_height(const PlaneTree& t, Count v) {
  Count base = 0;
  const auto z = subtree_generations(t, v, base);
  const Count size = subtree_sizes(t)[v - 1];
  const Count half = half_height_of(z, base, size);
  Count acc = 0;
  for (auto k = static_cast<std::size_t>(half - base + 1); k < z.size(); ++k) {
    acc += z[k];
    if (4 * acc >= size) return base + static_cast<Count>(k);
  }
  return std::nullopt;
}

ScaledProfile rescale(const Profile& profile, Count s, double b, std::span<const double> times) {
  if (!(b > 0.0)) throw Error(ErrorCode::ConfigError, "scale must be positive");
  ScaledProfile out;
  const double speed = static_cast<double>(s) / b;
  const auto gens = static_cast<double>(profile.z.size());
  for (double t : times) {
    out.t.push_back(t);
    if (t < 0.0) {
      out.C.push_back(0.0);
      out.Z.push_back(0.0);
      continue;
    }
    const double k = std::floor(t * speed);
    if (k >= gens) {
      out.C.push_back(1.0);
      out.Z.push_back(0.0);
    } else {
      const auto i = static_cast<std::size_t>(k);
      out.C.push_back(static_cast<double>(profile.c[i]) / static_cast<double>(s));
      out.Z.push_back(static_cast<double>(profile.z[i]) / b);
    }
  }
  return out;
}

}  // namespace treeprof
