#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace treeprof::stats {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of integer counts against probabilities summing to 1.
TestResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probabilities);

/// Two-sample chi-square homogeneity test on two count vectors over the same
/// categories. Adjacent categories are pooled until every pooled cell has an
/// expected count of at least `min_expected`.
TestResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                 double min_expected = 5.0);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
/// (Stephens' small-sample correction of the effective size).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double quantile(std::vector<double> x, double q);

/// Least-squares slope and intercept of y on x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace treeprof::stats
