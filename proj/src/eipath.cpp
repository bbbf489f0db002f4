#include "treeprof/eipath.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "treeprof/error.hpp"
#include "treeprof/stats.hpp"

namespace treeprof {

BetaSeries BetaSeries::finite(std::vector<double> beta) {
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(beta[i] >= 0.0) || !std::isfinite(beta[i]))
      throw Error(ErrorCode::ConfigError, "jump sizes must be finite and non-negative");
    if (i > 0 && beta[i] > beta[i - 1]) throw Error(ErrorCode::ConfigError, "jump sizes must be non-increasing");
  }
  while (!beta.empty() && beta.back() == 0.0) beta.pop_back();
  BetaSeries b;
  b.length_ = static_cast<Count>(beta.size());
  b.spec_ = "list:";
  for (std::size_t i = 0; i < beta.size(); ++i) b.spec_ += (i ? "," : "") + std::to_string(beta[i]);
  if (beta.empty()) b.spec_ = "none";
  b.term_ = [beta = std::move(beta)](Count i) {
    return i >= 1 && i <= static_cast<Count>(beta.size()) ? beta[static_cast<std::size_t>(i - 1)] : 0.0;
  };
  return b;
}

BetaSeries BetaSeries::power(double a) {
  if (!(a > 0.5)) throw Error(ErrorCode::ConfigError, "beta_i = i^-a needs a > 1/2 for square summability");
  BetaSeries b;
  b.length_ = std::nullopt;
  b.spec_ = "pow:" + std::to_string(a);
  b.term_ = [a](Count i) { return std::pow(static_cast<double>(i), -a); };
  return b;
}

BetaSeries BetaSeries::log_squared() {
  BetaSeries b;
  b.length_ = std::nullopt;
  b.spec_ = "logsq";
  b.term_ = [](Count i) {
    const double l = std::log(static_cast<double>(i) + 1.0);
    return 1.0 / (static_cast<double>(i) * l * l);
  };
  return b;
}

namespace {

double parse_double(std::string_view text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(std::string(text), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  return v;
}

}  // namespace

BetaSeries BetaSeries::parse(std::string_view spec) {
  if (spec.empty() || spec == "none") return BetaSeries{};
  if (spec == "logsq") return log_squared();
  if (spec.starts_with("pow:")) return power(parse_double(spec.substr(4)));
  if (spec.starts_with("list:")) {
    std::vector<double> beta;
    auto rest = spec.substr(5);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      beta.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return finite(std::move(beta));
  }
  throw Error(ErrorCode::ParseError, "unknown jump specification '" + std::string(spec) + "'");
}

double BetaSeries::operator()(Count i) const { return term_ ? term_(i) : 0.0; }

double EIParams::jump_square_sum() const {
  double s = 0.0;
  for (double b : beta) s += b * b;
  return s;
}

EIParams make_ei_params(double sigma, const BetaSeries& beta, double tail_tolerance, Count max_jumps) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::ConfigError, "sigma must be non-negative");
  EIParams p;
  p.sigma = sigma;
  if (beta.length()) {
    for (Count i = 1; i <= *beta.length(); ++i) p.beta.push_back(beta(i));
    return p;
  }
  const Count cap = std::max<Count>(max_jumps, 4);
  std::vector<double> squares(static_cast<std::size_t>(cap));
  for (Count i = 1; i <= cap; ++i) {
    const double b = beta(i);
    if (!(b >= 0.0) || (i > 1 && b > beta(i - 1)))
      throw Error(ErrorCode::ConfigError, "jump sizes must be non-negative and non-increasing");
    squares[static_cast<std::size_t>(i - 1)] = b * b;
  }
  // remainder past the cap from a local power law beta_j^2 ~ j^-q
  const double last = squares.back();
  const double mid = squares[static_cast<std::size_t>(cap / 2 - 1)];
  double remainder = 0.0;
  if (last > 0.0) {
    const double q = std::log(mid / last) / std::log(static_cast<double>(cap) / static_cast<double>(cap / 2));
    if (!(q > 1.0)) throw Error(ErrorCode::ConfigError, "sum of squared jump sizes does not converge");
    remainder = last * static_cast<double>(cap) / (q - 1.0);
  }
  std::vector<double> tail(squares.size() + 1, remainder);  // tail[J] = sum_{j > J}
  for (std::size_t j = squares.size(); j-- > 0;) tail[j] = tail[j + 1] + squares[j];
  std::size_t J = 0;
  while (J < squares.size() && tail[J] >= tail_tolerance) ++J;
  for (std::size_t j = 1; j <= J; ++j) p.beta.push_back(beta(static_cast<Count>(j)));
  p.tail_bound = tail[J];
  return p;
}

GridPath GridPath::from_function(Count m, const std::function<double(double)>& f) {
  if (m < 1) throw Error(ErrorCode::ConfigError, "grid resolution must be positive");
  GridPath g;
  g.values.resize(static_cast<std::size_t>(m) + 1);
  for (Count k = 0; k <= m; ++k) g.values[k] = f(static_cast<double>(k) / static_cast<double>(m));
  return g;
}

GridPath simulate_ei_bridge(const EIParams& p, Count m, SeededStream& rng) {
  if (m < 2) throw Error(ErrorCode::ConfigError, "grid resolution must be at least 2");
  const auto n = static_cast<std::size_t>(m);
  const double md = static_cast<double>(m);
  GridPath g;
  g.values.assign(n + 1, 0.0);
  if (p.sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(md));
    std::vector<double> walk(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) walk[k] = walk[k - 1] + normal(rng);
    for (std::size_t k = 0; k <= n; ++k)
      g.values[k] = p.sigma * (walk[k] - static_cast<double>(k) / md * walk[n]);
  }
  if (!p.beta.empty()) {
    std::vector<double> bucket(n + 1, 0.0);
    double total = 0.0;
    for (double b : p.beta) {
      const auto k = static_cast<std::size_t>(std::ceil(rng.uniform01() * md));
      bucket[std::min(k, n)] += b;
      total += b;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      acc += bucket[k];
      g.values[k] += acc - static_cast<double>(k) / md * total;
    }
  }
  g.values.front() = 0.0;
  g.values.back() = 0.0;
  return g;
}

VervaatPath vervaat_path(const GridPath& x) {
  const Count m = x.resolution();
  if (m < 1) throw Error(ErrorCode::ConfigError, "empty grid path");
  const auto first = x.values.begin();
  const auto rho = static_cast<Count>(std::min_element(first, first + m) - first);
  VervaatPath out;
  out.rho = rho;
  out.path.values.resize(x.values.size());
  const double base = x.values[rho];
  for (Count k = 0; k < m; ++k) out.path.values[k] = x.values[(k + rho) % m] - base;
  out.path.values[m] = 0.0;
  out.path.values[0] = 0.0;
  return out;
}

double Curve::at(double t) const {
  if (values.empty() || t < origin) return 0.0;
  const double u = (t - origin) / dt;
  const auto last = values.size() - 1;
  if (u >= static_cast<double>(last)) return values.back();
  const auto k = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

std::string_view to_string(LampertiCase c) {
  switch (c) {
    case LampertiCase::Trivial: return "trivial";
    case LampertiCase::FiniteExtinction: return "finite-extinction";
    case LampertiCase::InfiniteHorizon: return "infinite-horizon";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) { return v == Verdict::Bounded ? "bounded" : "inconclusive"; }

namespace {

constexpr int kRefinementLevels = 5;
constexpr double kContractionRatio = 0.9;

// g(k) is the path k cells away from a zero of it. Trapezoid sums of 1/g over
// [2^(l-1), 2^l] cells; a convergent integral makes them shrink geometrically.
template <class G>
bool diverges_near(const G& g) {
  std::vector<double> pieces;
  for (int level = 0; level < kRefinementLevels; ++level) {
    const Count lo = Count{1} << level;
    double sum = 0.0;
    for (Count k = lo; k < 2 * lo; ++k) sum += 0.5 * (1.0 / g(k) + 1.0 / g(k + 1));
    pieces.push_back(sum);
  }
  // pieces run from the endpoint outwards; ratio of each piece to the next one out
  int run = 0;
  for (int level = kRefinementLevels - 1; level > 0; --level) {
    if (pieces[level - 1] / pieces[level] > kContractionRatio) {
      if (++run >= 3) return true;
    } else {
      run = 0;
    }
  }
  return false;
}

double local_exponent(double near, double far) { return std::log(far / near) / std::log(2.0); }

// int over one cell of width h next to a zero, with f ~ A s^gamma and f(h) = f1
double singular_cell(double h, double f1, double gamma) { return h / (f1 * (1.0 - gamma)); }

}  // namespace

LampertiPair lamperti_pair(const GridPath& f, const LampertiOptions& options) {
  const Count m = f.resolution();
  if (m < 4) throw Error(ErrorCode::ConfigError, "grid resolution must be at least 4");
  const auto& v = f.values;
  constexpr double kZero = 1e-12;
  if (std::abs(v.front()) > kZero || std::abs(v.back()) > kZero)
    throw Error(ErrorCode::NotAnExcursion, "path must vanish at 0 and 1");
  for (Count k = 1; k < m; ++k)
    if (!(v[k] > 0.0))
      throw Error(ErrorCode::NotAnExcursion, "path is not positive at grid point " + std::to_string(k));
  const double h = f.spacing();
  const Count n = options.samples > 0 ? options.samples : m;
  LampertiPair pair;

  const double shift = options.continuity_shift;
  if (!(shift >= 0.0)) throw Error(ErrorCode::InvalidRange, "continuity shift must be non-negative");
  double gamma0 = std::max(0.0, local_exponent(v[1], v[2]));
  double gamma1 = std::max(0.0, local_exponent(v[m - 1], v[m - 2]));
  if (shift > 0.0) {
    gamma0 = gamma1 = 0.5;
  } else if (options.assume_integrable) {
    gamma0 = std::min(gamma0, 0.9);
    gamma1 = std::min(gamma1, 0.9);
  } else {
    const bool room = m >= (Count{2} << kRefinementLevels);
    pair.diverges_at_zero = gamma0 >= 1.0 || (room && diverges_near([&](Count k) { return v[k]; }));
    pair.diverges_at_one = gamma1 >= 1.0 || (room && diverges_near([&](Count k) { return v[m - k]; }));
  }
  if (pair.diverges_at_zero) {
    pair.kind = LampertiCase::Trivial;
    pair.c = Curve{0.0, 1.0, {0.0, 0.0}};
    pair.z = pair.c;
    return pair;
  }

  // I[k] = int_0^{k h} 1/f for k = 0..m-1
  std::vector<double> I(static_cast<std::size_t>(m), 0.0);
  I[1] = singular_cell(h, v[1] + shift, gamma0);
  for (Count k = 1; k + 1 < m; ++k) I[k + 1] = I[k] + 0.5 * h * (1.0 / (v[k] + shift) + 1.0 / (v[k + 1] + shift));
  const double I_last = I[m - 1];
  double horizon;
  double rate = 0.0;
  if (pair.diverges_at_one) {
    pair.kind = LampertiCase::InfiniteHorizon;
    rate = v[m - 1] / h;  // f ~ rate (1 - s) in the last cell
    horizon = I_last + 10.0 / rate;
  } else {
    pair.kind = LampertiCase::FiniteExtinction;
    horizon = I_last + singular_cell(h, v[m - 1] + shift, gamma1);
    pair.extinction_time = horizon;
  }

  const double dt = horizon / static_cast<double>(n);
  pair.c = Curve{0.0, dt, std::vector<double>(static_cast<std::size_t>(n) + 1)};
  pair.z = Curve{0.0, dt, std::vector<double>(static_cast<std::size_t>(n) + 1)};
  auto f_at = [&](double s) {
    const double u = std::clamp(s, 0.0, 1.0) * static_cast<double>(m);
    const auto k = std::min(static_cast<Count>(u), m - 1);
    const double frac = u - static_cast<double>(k);
    return v[k] + frac * (v[k + 1] - v[k]);
  };
  Count k = 1;
  for (Count j = 0; j <= n; ++j) {
    const double t = j == n ? horizon : dt * static_cast<double>(j);
    double s;
    if (t <= I[1]) {
      s = h * std::pow(t / I[1], 1.0 / (1.0 - gamma0));
    } else if (t < I_last) {
      while (I[k + 1] <= t) ++k;
      s = (static_cast<double>(k) + (t - I[k]) / (I[k + 1] - I[k])) * h;
    } else if (pair.diverges_at_one) {
      s = 1.0 - h * std::exp(-rate * (t - I_last));
    } else {
      const double left = std::max(0.0, horizon - t) / (horizon - I_last);
      s = 1.0 - h * std::pow(left, 1.0 / (1.0 - gamma1));
    }
    pair.c.values[j] = s;
    pair.z.values[j] = f_at(s);
  }
  if (pair.kind == LampertiCase::FiniteExtinction) {
    pair.c.values.back() = 1.0;
    pair.z.values.back() = 0.0;
  }
  return pair;
}

double continuity_shift(double sigma, Count resolution) {
  if (resolution < 1) throw Error(ErrorCode::InvalidRange, "resolution must be positive");
  return kContinuityCorrection * std::abs(sigma) / std::sqrt(static_cast<double>(resolution));
}

Curve shift_solution(const Curve& c, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidRange, "shift must be non-negative");
  if (std::isinf(lambda)) return Curve{0.0, c.dt, {0.0}};
  Curve out = c;
  out.origin += lambda;
  return out;
}

double StepFunction::at(double x) const {
  if (x < 0.0) x = 0.0;
  const double u = x / width;
  if (u >= static_cast<double>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(u)];
}

StepFunction step_function(const GridPath& f) {
  StepFunction s;
  s.width = f.spacing();
  const auto m = static_cast<std::size_t>(f.resolution());
  s.values.resize(m);
  for (std::size_t k = 0; k < m; ++k) s.values[k] = std::max(f.values[k], f.values[k + 1]);
  return s;
}

StepFunction step_function(std::span<const Count> walk) {
  StepFunction s;
  s.width = 1.0;
  s.values.assign(walk.begin(), walk.end());
  return s;
}

Curve euler_ode(const StepFunction& f, double step, Count max_steps) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidRange, "step must be positive");
  Curve c{0.0, step, {0.0}};
  const double domain = f.domain();
  double x = 0.0;
  for (Count k = 0; k < max_steps; ++k) {
    const double increment = step * f.at(x);
    if (increment <= 0.0) break;
    x = std::min(x + increment, domain);
    c.values.push_back(x);
  }
  return c;
}

IntegralEstimate inverse_integral(const GridPath& x, double a, double b) {
  const Count m = x.resolution();
  if (!(0.0 <= a && a < b && b <= 1.0)) throw Error(ErrorCode::InvalidRange, "need 0 <= a < b <= 1");
  const auto lo = static_cast<Count>(std::llround(a * static_cast<double>(m)));
  const auto hi = static_cast<Count>(std::llround(b * static_cast<double>(m)));
  if (hi - lo < 1) throw Error(ErrorCode::InvalidRange, "interval shorter than one grid cell");
  const auto& v = x.values;
  for (Count k = lo + 1; k < hi; ++k)
    if (!(v[k] > 0.0)) throw Error(ErrorCode::NonPositivePath, "path not positive at grid point " + std::to_string(k));
  const bool open_lo = !(v[lo] > 0.0);
  const bool open_hi = !(v[hi] > 0.0);
  if ((open_lo || open_hi) && hi - lo < 3)
    throw Error(ErrorCode::InvalidRange, "need three cells next to a zero of the path");

  IntegralEstimate est;
  const bool room = hi - lo >= (Count{2} << kRefinementLevels);
  if (open_lo) est.diverges |= local_exponent(v[lo + 1], v[lo + 2]) >= 1.0 ||
                               (room && diverges_near([&](Count k) { return v[lo + k]; }));
  if (open_hi) est.diverges |= local_exponent(v[hi - 1], v[hi - 2]) >= 1.0 ||
                               (room && diverges_near([&](Count k) { return v[hi - k]; }));

  // trapezoid with the given stride; a final short cell covers odd spans
  auto integrate = [&](Count stride) {
    const double h = x.spacing() * static_cast<double>(stride);
    double sum = 0.0;
    Count k = lo;
    auto cell = [&](Count i, Count j, double width) {
      if (i == lo && open_lo) {
        const double g = std::clamp(local_exponent(v[j], v[j + (j - i)]), 0.0, 0.99);
        return singular_cell(width, v[j], g);
      }
      if (j == hi && open_hi) {
        const double g = std::clamp(local_exponent(v[i], v[i - (j - i)]), 0.0, 0.99);
        return singular_cell(width, v[i], g);
      }
      return 0.5 * width * (1.0 / v[i] + 1.0 / v[j]);
    };
    for (; k + stride <= hi; k += stride) sum += cell(k, k + stride, h);
    if (k < hi) sum += cell(k, hi, x.spacing() * static_cast<double>(hi - k));
    return sum;
  };
  est.value = integrate(1);
  const bool coarse_ok = hi - lo >= 6 && (!open_lo || lo + 4 <= hi) && (!open_hi || hi - 4 >= lo);
  est.error = coarse_ok ? std::abs(est.value - integrate(2)) : 0.0;
  return est;
}

double hitting_time(const Curve& c, double x) {
  const auto& v = c.values;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] >= x) {
      if (k == 0) return c.origin;
      const double frac = (x - v[k - 1]) / (v[k] - v[k - 1]);
      return c.origin + c.dt * (static_cast<double>(k - 1) + frac);
    }
  }
  throw Error(ErrorCode::LevelNotReached, "curve never reaches " + std::to_string(x));
}

Curve compose(const GridPath& f, const Curve& c) {
  const Count m = f.resolution();
  Curve out{c.origin, c.dt, std::vector<double>(c.values.size())};
  for (std::size_t j = 0; j < c.values.size(); ++j) {
    const double u = std::max(0.0, c.values[j]) * static_cast<double>(m);
    const auto k = std::min(static_cast<Count>(u), m);
    out.values[j] = f.values[k];
  }
  return out;
}

BoundednessReport boundedness_criteria(double sigma, std::span<const double> beta) {
  BoundednessReport r;
  if (sigma > 0.0) {
    r.verdict = Verdict::Bounded;
    r.reason = "sigma^2 > 0";
    return r;
  }
  std::vector<double> b(beta.begin(), beta.end());
  while (!b.empty() && b.back() <= 0.0) b.pop_back();
  if (b.size() < 2 || !(b.back() < b.front())) {
    r.reason = "no jumps to assess";
    return r;
  }

  // alpha*: slope of log #{i : beta_i > x} against log(1/x)
  constexpr int kGrid = 64;
  constexpr double kMinCount = 100.0;
  const double lo = std::log(b.back());
  const double hi = std::log(b.front());
  std::vector<double> lx;
  std::vector<double> lcount;
  for (int g = 0; g < kGrid; ++g) {
    const double x = std::exp(lo + (hi - lo) * g / (kGrid - 1));
    const auto count = static_cast<double>(
        std::upper_bound(b.begin(), b.end(), x, std::greater<>()) - b.begin());
    if (count < kMinCount) continue;
    lx.push_back(-std::log(x));
    lcount.push_back(std::log(count));
  }
  if (lx.size() < 2) {
    r.reason = "too few jumps to estimate alpha*";
    return r;
  }
  r.alpha_star = stats::linear_fit(lx, lcount).slope;

  // p with beta_i ~ i^-p, on geometrically spaced ranks
  std::vector<double> li;
  std::vector<double> lb;
  const double top = static_cast<double>(b.size());
  for (int g = 0; g < kGrid; ++g) {
    const auto i = static_cast<std::size_t>(std::llround(std::pow(top, static_cast<double>(g) / (kGrid - 1))));
    if (!li.empty() && std::log(static_cast<double>(i)) == li.back()) continue;
    li.push_back(std::log(static_cast<double>(i)));
    lb.push_back(std::log(b[i - 1]));
  }
  r.tail_exponent = li.size() >= 2 ? -stats::linear_fit(li, lb).slope : 0.0;

  if (r.alpha_star > 1.5) {
    r.verdict = Verdict::Bounded;
    r.reason = "alpha* > 3/2";
    return r;
  }
  if (!(r.alpha_star > 1.0)) {
    r.reason = "alpha* <= 1: no alpha in (1, 2) with x^alpha #{beta > x} -> infinity";
    return r;
  }
  const double bound = 1.0 / (2.0 - r.alpha_star);
  for (int k = 100; k <= 200; ++k) {
    const double a = k / 100.0;
    if (!(a < bound)) break;
    r.tested_alpha.push_back(a);
    if (a * r.tail_exponent > 1.0) {
      r.alpha_tilde = a;
      r.verdict = Verdict::Bounded;
      r.reason = "sum beta_i^alpha~ converges with alpha~ < 1/(2 - alpha*)";
      return r;
    }
  }
  r.reason = "no tested alpha~ < 1/(2 - alpha*) gives a convergent sum beta_i^alpha~";
  return r;
}

}  // namespace treeprof
