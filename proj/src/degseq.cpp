#include "treeprof/degseq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treeprof/error.hpp"
#include "treeprof/stats.hpp"

namespace treeprof {

namespace {

Count checked_add(Count a, Count b) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "count overflow");
  return r;
}

Count checked_mul(Count a, Count b) {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "count overflow");
  return r;
}

}  // namespace

DegreeSequence DegreeSequence::validate(const std::map<Count, Count>& counts) {
  DegreeSequence ds;
  Count vertices = 0;
  Count edges = 0;
  for (auto [children, n] : counts) {
    if (children < 0 || n < 0)
      throw Error(ErrorCode::ParseError, "negative child count or multiplicity");
    if (n == 0) continue;
    ds.counts_[children] = n;
    vertices = checked_add(vertices, n);
    edges = checked_add(edges, checked_mul(children, n));
  }
  if (vertices == 0) throw Error(ErrorCode::Empty, "degree sequence has no vertices");
  if (vertices != edges + 1)
    throw Error(ErrorCode::BalanceViolation, "sum N_i = " + std::to_string(vertices) +
                                                 " but 1 + sum i N_i = " + std::to_string(edges + 1));
  ds.size_ = vertices;
  return ds;
}

Count DegreeSequence::count(Count children) const {
  auto it = counts_.find(children);
  return it == counts_.end() ? 0 : it->second;
}

double DegreeSequence::degree_square_sum() const {
  double sum = 0.0;
  for (auto [i, n] : counts_) {
    const double d = static_cast<double>(i) - 1.0;
    sum += d * d * static_cast<double>(n);
  }
  return sum;
}

std::vector<Count> child_sequence(const DegreeSequence& ds) {
  std::vector<Count> d;
  d.reserve(static_cast<std::size_t>(ds.size()));
  for (auto it = ds.counts().rbegin(); it != ds.counts().rend(); ++it)
    d.insert(d.end(), static_cast<std::size_t>(it->second), it->first);
  return d;
}

DegreeSequence degree_sequence_of(std::span<const Count> children) {
  std::map<Count, Count> counts;
  for (Count c : children) ++counts[c];
  return DegreeSequence::validate(counts);
}

std::vector<DegreeSequence> all_degree_sequences(Count s) {
  if (s < 1) throw Error(ErrorCode::ConfigError, "size must be positive");
  std::vector<DegreeSequence> out;
  std::vector<Count> d;
  // non-increasing child sequences of length s with sum s - 1
  auto extend = [&](auto&& self, Count left, Count cap) -> void {
    const auto placed = static_cast<Count>(d.size());
    if (placed == s) {
      if (left == 0) out.push_back(degree_sequence_of(d));
      return;
    }
    for (Count c = std::min(cap, left); c >= 0; --c) {
      d.push_back(c);
      self(self, left - c, c);
      d.pop_back();
    }
  };
  extend(extend, s - 1, s - 1);
  std::reverse(out.begin(), out.end());
  return out;
}

DegreeSequence gen_kary(Count k, Count n) {
  if (k < 1 || n < 1) throw Error(ErrorCode::ConfigError, "gen_kary needs k >= 1 and n >= 1");
  const Count leaves = checked_add(1, checked_mul(k - 1, n));
  checked_add(1, checked_mul(n, k));
  if (k == 1) return DegreeSequence::validate({{0, 1}, {1, n}});
  return DegreeSequence::validate({{0, leaves}, {k, n}});
}

DegreeSequence gen_restricted(const std::map<Count, Count>& inner_counts) {
  std::map<Count, Count> counts;
  Count leaves = 1;
  for (auto [i, n] : inner_counts) {
    if (i < 1 || n < 0) throw Error(ErrorCode::ConfigError, "restricted degrees must be >= 1");
    if (n == 0) continue;
    counts[i] = n;
    leaves = checked_add(leaves, checked_mul(i - 1, n));
  }
  if (counts.empty()) throw Error(ErrorCode::Empty, "restricted family needs a positive inner count");
  counts[0] += leaves;
  return DegreeSequence::validate(counts);
}

PowerlawSequence gen_powerlaw(double alpha, Count n) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw Error(ErrorCode::ConfigError, "powerlaw alpha must lie in (1/2, 1)");
  if (n < 2) throw Error(ErrorCode::ConfigError, "powerlaw needs n >= 2");
  constexpr double eps = 1e-9;
  const auto scale = static_cast<Count>(std::floor(std::pow(static_cast<double>(n), alpha) + eps));
  const double b = static_cast<double>(scale);
  std::map<Count, Count> counts;
  std::vector<Count> hub_degrees;
  Count leaves = 1;
  for (Count j = 1;; ++j) {
    const double hub = b * std::pow(static_cast<double>(j), -alpha);
    if (hub + eps < 1.0) break;
    const auto d = static_cast<Count>(std::floor(hub + eps));
    hub_degrees.push_back(d);
    ++counts[d];
    leaves += d - 1;
  }
  if (hub_degrees.empty()) throw Error(ErrorCode::DegenerateSize, "no hub reaches degree 1");
  counts[0] += leaves;
  const auto hubs = static_cast<Count>(hub_degrees.size());
  return PowerlawSequence{DegreeSequence::validate(counts), scale, hubs, std::move(hub_degrees)};
}

DegreeSequence gen_sigma_plus_jumps(const DegreeSequence& base, std::span<const double> beta, Count max_jumps) {
  std::map<Count, Count> counts = base.counts();
  const double root_s = std::sqrt(static_cast<double>(base.size()));
  const auto jumps = std::min<Count>(static_cast<Count>(beta.size()), max_jumps);
  for (Count j = 0; j < jumps; ++j) {
    if (beta[j] < 0.0) throw Error(ErrorCode::ConfigError, "jump sizes must be non-negative");
    if (j > 0 && beta[j] > beta[j - 1]) throw Error(ErrorCode::ConfigError, "jump sizes must be non-increasing");
    const auto d = static_cast<Count>(std::floor(beta[j] * root_s));
    if (d < 1) continue;
    ++counts[d];
    counts[0] += d - 1;
  }
  return DegreeSequence::validate(counts);
}

OffspringLaw::OffspringLaw(std::vector<double> probabilities) : probs_(std::move(probabilities)) {
  if (probs_.empty()) throw Error(ErrorCode::ConfigError, "empty offspring law");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorCode::ConfigError, "offspring probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::ConfigError, "offspring probabilities must sum to 1");
  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
  cdf_.back() = 1.0;
}

double OffspringLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
  return m;
}

double OffspringLaw::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) v += (static_cast<double>(k) - m) * (static_cast<double>(k) - m) * probs_[k];
  return v;
}

bool OffspringLaw::is_critical() const { return std::abs(mean() - 1.0) <= kTolerance; }

Count OffspringLaw::period() const {
  Count g = 0;
  for (std::size_t k = 1; k < probs_.size(); ++k)
    if (probs_[k] > 0.0) g = std::gcd(g, static_cast<Count>(k));
  return g;
}

Count OffspringLaw::sample(SeededStream& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  auto k = static_cast<Count>(it - cdf_.begin());
  if (k >= static_cast<Count>(probs_.size())) k = static_cast<Count>(probs_.size()) - 1;
  return k;
}

DegreeSequence sample_cgw_degree_sequence(const OffspringLaw& mu, Count n, SeededStream& rng, Count max_attempts) {
  if (n < 1) throw Error(ErrorCode::ConfigError, "cgw size must be positive");
  std::vector<Count> draws(static_cast<std::size_t>(n));
  for (Count attempt = 0; attempt < max_attempts; ++attempt) {
    Count total = 0;
    bool overflow = false;
    for (Count i = 0; i < n; ++i) {
      draws[static_cast<std::size_t>(i)] = mu.sample(rng);
      total += draws[static_cast<std::size_t>(i)];
      if (total > n - 1) {
        overflow = true;
        break;
      }
    }
    if (!overflow && total == n - 1) return degree_sequence_of(draws);
  }
  throw Error(ErrorCode::RejectionBudgetExceeded,
              "no sample with sum (xi - 1) = -1 after " + std::to_string(max_attempts) + " attempts");
}

HypothesisReport hypothesis_diagnostics(std::span<const DegreeSequence> family, std::span<const double> scales) {
  if (family.size() < 3 || scales.size() != family.size())
    throw Error(ErrorCode::ConfigError, "diagnostics need at least 3 family members and one scale per member");
  HypothesisReport r;
  std::vector<double> inv_scale;
  for (std::size_t n = 0; n < family.size(); ++n) {
    const double b = scales[n];
    if (!(b > 0.0)) throw Error(ErrorCode::ConfigError, "scales must be positive");
    const auto& ds = family[n];
    r.sizes.push_back(ds.size());
    r.scales.push_back(b);
    inv_scale.push_back(1.0 / b);
    std::vector<double> ratios;
    Count rank = 0;
    for (auto it = ds.counts().rbegin(); it != ds.counts().rend() && rank < kHubRanks; ++it)
      for (Count c = 0; c < it->second && rank < kHubRanks; ++c, ++rank)
        ratios.push_back(static_cast<double>(it->first) / b);
    ratios.resize(kHubRanks, 0.0);
    r.hub_ratios.push_back(std::move(ratios));
    r.variance_statistic.push_back(ds.degree_square_sum() / (b * b));
    r.size_over_scale.push_back(static_cast<double>(ds.size()) / b);
  }

  auto increasing = [](const auto& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  r.size_diverges = increasing(r.sizes);
  r.size_over_scale_diverges = increasing(r.size_over_scale);
  if (!r.size_diverges) r.notes.push_back("size does not grow along the family");
  if (!r.size_over_scale_diverges) r.notes.push_back("s_n/b_n does not grow along the family");

  bool scales_vary = false;
  for (std::size_t i = 1; i < scales.size(); ++i) scales_vary |= scales[i] != scales[0];

  auto extrapolate = [&](const std::vector<double>& y) {
    if (!scales_vary) return y.back();
    return stats::linear_fit(inv_scale, y).intercept;
  };

  double beta_sq = 0.0;
  double beta_sum = 0.0;
  for (int i = 0; i < kHubRanks; ++i) {
    std::vector<double> y;
    for (const auto& ratios : r.hub_ratios) y.push_back(ratios[static_cast<std::size_t>(i)]);
    double beta = std::max(0.0, extrapolate(y));
    if (beta < 1e-6) beta = 0.0;
    if (!r.beta_estimate.empty()) beta = std::min(beta, r.beta_estimate.back());
    r.beta_estimate.push_back(beta);
    beta_sq += beta * beta;
    beta_sum += beta;
  }
  r.variance_limit = extrapolate(r.variance_statistic);
  r.sigma2_estimate = std::max(0.0, r.variance_limit - beta_sq);
  // finite data cannot show sum beta_i = infinity; only sigma^2 > 0 is detectable
  r.unbounded_variation = r.sigma2_estimate > 1e-3;
  if (!r.unbounded_variation)
    r.notes.push_back("sigma^2 estimate vanishes; unbounded variation would require sum beta_i = infinity");
  r.degenerate = beta_sum == 0.0 && r.variance_limit < 1e-3;
  if (r.degenerate)
    r.notes.push_back("degree variance vanishes: bounded-variation (degenerate) limit");
  return r;
}

}  // namespace treeprof
