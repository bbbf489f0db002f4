#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treeprof/rng.hpp"

namespace treeprof {

using Count = std::int64_t;

/// Counts N_i of vertices with i children. Stored sparsely: hub families have
/// a maximum degree far larger than the number of distinct degrees.
/// Invariant: sum_i N_i = 1 + sum_i i N_i, and the size is at least one.
class DegreeSequence {
 public:
  /// Drops zero entries, checks the balance identity.
  /// Throws Error{Empty} if every count is zero, Error{BalanceViolation}
  /// if the identity fails, Error{ParseError} on negative keys or counts.
  static DegreeSequence validate(const std::map<Count, Count>& counts);

  const std::map<Count, Count>& counts() const { return counts_; }
  Count count(Count children) const;
  /// s = sum_i N_i
  Count size() const { return size_; }
  Count max_degree() const { return counts_.rbegin()->first; }
  /// sum_i (i-1)^2 N_i
  double degree_square_sum() const;

  bool operator==(const DegreeSequence&) const = default;

 private:
  DegreeSequence() = default;
  std::map<Count, Count> counts_;
  Count size_ = 0;
};

/// Child sequence: every child count written N_i times, sorted non-increasing.
std::vector<Count> child_sequence(const DegreeSequence& ds);
/// Counts of an arbitrary array of child counts (validated).
DegreeSequence degree_sequence_of(std::span<const Count> children);

/// Every degree sequence of size s, in lexicographic order of child sequences.
std::vector<DegreeSequence> all_degree_sequences(Count s);

/// k-ary trees with n inner vertices: N_k = n, N_0 = 1 + (k-1) n.
DegreeSequence gen_kary(Count k, Count n);

/// Restricted-degree trees: N_i = n_i for i in the support, N_0 closes the balance.
DegreeSequence gen_restricted(const std::map<Count, Count>& inner_counts);

struct PowerlawSequence {
  DegreeSequence ds;
  Count scale = 0;  // b_n = floor(n^alpha)
  Count hubs = 0;   // M_n
  std::vector<Count> hub_degrees;
};

/// Hubs d_j = floor(j^-alpha * b_n) for every j with j^-alpha * b_n >= 1,
/// b_n = floor(n^alpha), leaves N_0 = 1 + sum_j (d_j - 1). Equal hub degrees
/// are counted with multiplicity.
PowerlawSequence gen_powerlaw(double alpha, Count n);

/// Adds hubs d_j = floor(beta_j sqrt(s)) (s = size of `base`) for
/// j < min(beta.size(), max_jumps) with d_j >= 1, inflating N_0 by
/// sum_j (d_j - 1). A hub degree already present increments that count.
DegreeSequence gen_sigma_plus_jumps(const DegreeSequence& base, std::span<const double> beta,
                                    Count max_jumps);

/// Offspring distribution (mu_0, ..., mu_K).
class OffspringLaw {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit OffspringLaw(std::vector<double> probabilities);

  const std::vector<double>& probabilities() const { return probs_; }
  double mean() const;
  double variance() const;
  bool is_critical() const;
  /// gcd of the support {k : mu_k > 0}; aperiodic iff it equals 1.
  Count period() const;
  bool is_aperiodic() const { return period() == 1; }

  /// Inverse-CDF draw.
  Count sample(SeededStream& rng) const;

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

/// Counts of xi_1..xi_n iid from mu conditioned on sum (xi_i - 1) = -1,
/// by plain rejection. Throws Error{RejectionBudgetExceeded}.
DegreeSequence sample_cgw_degree_sequence(const OffspringLaw& mu, Count n, SeededStream& rng,
                                          Count max_attempts = 1'000'000);

struct HypothesisReport {
  std::vector<Count> sizes;
  std::vector<double> scales;
  /// hub_ratios[n][i] = d^n_{i+1} / b_n for ranks i < 10
  std::vector<std::vector<double>> hub_ratios;
  /// (1/b_n^2) sum (i-1)^2 N_i
  std::vector<double> variance_statistic;
  std::vector<double> size_over_scale;
  bool size_diverges = false;
  bool size_over_scale_diverges = false;
  /// extrapolated to 1/b_n -> 0 by least squares over the family
  std::vector<double> beta_estimate;
  double variance_limit = 0.0;
  double sigma2_estimate = 0.0;
  bool unbounded_variation = false;
  /// No jumps and no degree variance: the walk limit has bounded variation.
  bool degenerate = false;
  std::vector<std::string> notes;
};

inline constexpr int kHubRanks = 10;

/// Best-effort numeric check of the Size / Hubs / Degree variance /
/// Unbounded variation hypotheses along a family. Never throws on
/// non-convergence; it is reported instead.
HypothesisReport hypothesis_diagnostics(std::span<const DegreeSequence> family, std::span<const double> scales);

}  // namespace treeprof
