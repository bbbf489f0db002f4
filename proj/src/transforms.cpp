#include "treeprof/transforms.hpp"

#include <algorithm>
#include <string>

#include "treeprof/error.hpp"

namespace treeprof {

namespace {

void check_vertex(Count s, Count v) {
  if (v < 1 || v > s)
    throw Error(ErrorCode::InvalidVertex, "vertex " + std::to_string(v) + " outside 1.." + std::to_string(s));
}

void append(std::vector<Count>& out, const std::vector<Count>& d, Count from, Count to) {
  out.insert(out.end(), d.begin() + from, d.begin() + to);
}

Count ancestor_at(const std::vector<Count>& parent, Count position, Count distance) {
  for (Count k = 0; k < distance; ++k) position = parent[position];
  return position;
}

}  // namespace

PlaneTree graft_213(const PlaneTree& t, Count deep, Count ancestor) {
  check_vertex(t.size(), deep);
  check_vertex(t.size(), ancestor);
  const auto& d = t.dfs_degrees();
  const auto size = subtree_sizes(t);
  const Count p = deep - 1;
  const Count a = ancestor - 1;
  const Count s = t.size();
  if (!(a < p && p < a + size[a]))
    throw Error(ErrorCode::InvalidVertex,
                "vertex " + std::to_string(ancestor) + " is not a strict ancestor of " + std::to_string(deep));
  std::vector<Count> out;
  out.reserve(d.size());
  append(out, d, a, p);
  append(out, d, 0, a);
  append(out, d, p, p + size[p]);
  append(out, d, a + size[a], s);
  append(out, d, p + size[p], a + size[a]);
  return PlaneTree::from_dfs_degrees(std::move(out));
}

PlaneTree transform_213(const PlaneTree& t, Count v, Count h) {
  check_vertex(t.size(), v);
  if (h < 1) throw Error(ErrorCode::InvalidRange, "h must be at least 1");
  const auto height = heights(t)[v - 1];
  if (height <= h) return t;
  const auto a = ancestor_at(parents(t), v - 1, h);
  return graft_213(t, v, a + 1);
}

PlaneTree inverse_213(const PlaneTree& t, Count v, Count h) {
  check_vertex(t.size(), v);
  if (h < 1) throw Error(ErrorCode::InvalidRange, "h must be at least 1");
  const auto height = heights(t)[v - 1];
  if (height <= h) return t;
  const auto a = ancestor_at(parents(t), v - 1, height - h);
  return graft_213(t, v, a + 1);
}

LatticeWalk psi_walk(std::span<const Count> walk, Count u, Count v) {
  const auto s = static_cast<Count>(walk.size()) - 1;
  check_vertex(s, u);
  check_vertex(s, v);
  auto dw = [&](Count j) { return walk[j] - walk[j - 1]; };
  auto excursion_length = [&](Count x) {
    for (Count j = 1; j <= s - x + 1; ++j)
      if (walk[x - 1 + j] - walk[x - 1] == -1) return j;
    throw Error(ErrorCode::NotAnExcursion, "walk does not close the subtree of " + std::to_string(x));
  };
  const Count du = excursion_length(u);
  const Count dv = excursion_length(v);
  if (!(v < u && u < v + dv))
    throw Error(ErrorCode::InvalidVertex,
                "vertex " + std::to_string(v) + " is not a strict ancestor of " + std::to_string(u));
  std::vector<Count> inc(static_cast<std::size_t>(s));
  for (Count j = 1; j <= s; ++j) {
    Count src;
    if (j <= u - v)
      src = v - 1 + j;
    else if (j <= u - 1)
      src = j - (u - v);
    else if (j <= u - 1 + du)
      src = j;
    else if (j <= s + u + du - v - dv)
      src = v + dv + j - (u + du);
    else
      src = u + du + j - (s + u + du - v - dv + 1);
    inc[j - 1] = dw(src);
  }
  return LatticeWalk{WalkKind::DFW, walk_from<Count>(inc, walk[0])};
}

std::vector<double> RealWalk::increments() const {
  std::vector<double> x;
  if (values.size() < 2) return x;
  x.resize(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) x[i] = values[i + 1] - values[i];
  return x;
}

RealWalk real_walk(std::span<const double> increments) { return RealWalk{walk_from(increments, 0.0)}; }

std::vector<double> future_minimum(std::span<const double> w) {
  std::vector<double> f(w.begin(), w.end());
  for (std::size_t i = f.size(); i-- > 1;) f[i - 1] = std::min(f[i - 1], f[i]);
  return f;
}

std::vector<double> running_max(std::span<const double> w) {
  std::vector<double> m(w.begin(), w.end());
  for (std::size_t i = 1; i < m.size(); ++i) m[i] = std::max(m[i - 1], m[i]);
  return m;
}

Count straddle_d(std::span<const double> w, Count t) {
  const auto n = static_cast<Count>(w.size());
  if (t < 0 || t >= n) throw Error(ErrorCode::InvalidRange, "time outside the walk");
  const auto m = running_max(w);
  for (Count s = t; s < n; ++s)
    if (w[s] == m[s]) return s;
  return -1;
}

ExcursionDecomposition excursion_decompose(std::span<const double> w) {
  ExcursionDecomposition e;
  const auto m = running_max(w);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] == m[i]) e.boundaries.push_back(static_cast<Count>(i));
  return e;
}

RealWalk excursion_permute(const RealWalk& w, std::span<const Count> sigma) {
  const auto e = excursion_decompose(w.values);
  const Count k = e.excursions();
  if (static_cast<Count>(sigma.size()) != k)
    throw Error(ErrorCode::PermutationSizeMismatch,
                "walk has " + std::to_string(k) + " excursions, permutation has " + std::to_string(sigma.size()));
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (Count j : sigma) {
    if (j < 0 || j >= k || seen[j]) throw Error(ErrorCode::PermutationSizeMismatch, "not a permutation");
    seen[j] = true;
  }
  const auto x = w.increments();
  std::vector<double> y;
  y.reserve(x.size());
  for (Count i = 0; i < k; ++i) {
    const Count b = sigma[i];
    y.insert(y.end(), x.begin() + e.boundaries[b], x.begin() + e.boundaries[b + 1]);
  }
  y.insert(y.end(), x.begin() + e.boundaries.back(), x.end());
  return real_walk(y);
}

namespace {

Count unique_argmin(std::span<const double> w) {
  const auto it = std::min_element(w.begin(), w.end());
  if (std::count(w.begin(), w.end(), *it) != 1) throw Error(ErrorCode::TiedExtremum, "minimum attained more than once");
  return static_cast<Count>(it - w.begin());
}

Count unique_argmax(std::span<const double> w) {
  const auto it = std::max_element(w.begin(), w.end());
  if (std::count(w.begin(), w.end(), *it) != 1) throw Error(ErrorCode::TiedExtremum, "maximum attained more than once");
  return static_cast<Count>(it - w.begin());
}

}  // namespace

RealWalk future_min_transform(const RealWalk& w) {
  unique_argmin(w.values);
  unique_argmax(w.values);
  const auto n = w.values.size() - 1;
  std::vector<double> reversed(w.values.size());
  for (std::size_t j = 0; j <= n; ++j) reversed[j] = w.values[n] - w.values[n - j];
  RealWalk y{std::move(reversed)};
  const Count k = excursion_decompose(y.values).excursions();
  std::vector<Count> sigma(static_cast<std::size_t>(k));
  for (Count i = 0; i < k; ++i) sigma[i] = k - 1 - i;
  return excursion_permute(y, sigma);
}

std::vector<double> post_min_future_min_path(std::span<const double> w) {
  const Count rho = unique_argmin(w);
  const auto f = future_minimum(w);
  std::vector<double> out;
  for (auto i = static_cast<std::size_t>(rho); i < f.size(); ++i) out.push_back(f[i] - f[rho]);
  return out;
}

std::vector<double> max_at_d_path(std::span<const double> w) {
  const Count eta = unique_argmax(w);
  const auto m = running_max(w);
  std::vector<double> out(static_cast<std::size_t>(eta) + 1);
  Count d = eta;
  for (Count j = eta; j >= 0; --j) {
    if (w[j] == m[j]) d = j;
    out[j] = m[d];
  }
  return out;
}

}  // namespace treeprof
