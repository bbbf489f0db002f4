#include "treeprof/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace treeprof::stats {

namespace {

double chi_square_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

TestResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  TestResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probabilities[i];
    if (e <= 0.0) {
      if (observed[i] != 0) return {INFINITY, 0.0, 0.0};
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
    r.dof += 1.0;
  }
  r.dof -= 1.0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

TestResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                 double min_expected) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::int64_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::int64_t{0}));
  if (na == 0.0 || nb == 0.0) return {};
  const double frac = std::min(na, nb) / (na + nb);

  // pool adjacent categories so the smaller sample expects >= min_expected per cell
  std::vector<std::int64_t> pa, pb;
  std::int64_t acc_a = 0, acc_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc_a += a[i];
    acc_b += b[i];
    if (static_cast<double>(acc_a + acc_b) * frac >= min_expected) {
      pa.push_back(acc_a);
      pb.push_back(acc_b);
      acc_a = acc_b = 0;
    }
  }
  if (acc_a + acc_b > 0) {
    if (pa.empty()) {
      pa.push_back(0);
      pb.push_back(0);
    }
    pa.back() += acc_a;
    pb.back() += acc_b;
  }

  TestResult r;
  const double n = na + nb;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double col = static_cast<double>(pa[i] + pb[i]);
    const double ea = col * na / n;
    const double eb = col * nb / n;
    r.statistic += (pa[i] - ea) * (pa[i] - ea) / ea + (pb[i] - eb) * (pb[i] - eb) / eb;
  }
  r.dof = static_cast<double>(pa.size()) - 1.0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) return 0.0;
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, x.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return x[lo] * (1.0 - w) + x[hi] * w;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace treeprof::stats
