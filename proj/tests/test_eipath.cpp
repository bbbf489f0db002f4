#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "treeprof/eipath.hpp"
#include "treeprof/error.hpp"
#include "treeprof/sampler.hpp"
#include "treeprof/stats.hpp"

using namespace treeprof;
using std::numbers::pi;

namespace {

GridPath semicircle(Count m) {
  return GridPath::from_function(m, [](double s) { return std::sqrt(std::max(0.0, s * (1.0 - s))); });
}

double sup_error_sin2(const Curve& c) {
  double err = 0.0;
  for (std::size_t j = 0; j < c.values.size(); ++j) {
    const double t = std::min(c.origin + c.dt * static_cast<double>(j), pi);
    err = std::max(err, std::abs(c.values[j] - std::pow(std::sin(t / 2.0), 2)));
  }
  return err;
}

// sample variance at grid index k and its standard error
std::pair<double, double> variance_at(const EIParams& p, Count m, Count k, int paths, std::uint64_t seed) {
  std::vector<double> x;
  for (int r = 0; r < paths; ++r) {
    SeededStream rng(seed, static_cast<std::uint64_t>(r));
    x.push_back(simulate_ei_bridge(p, m, rng).values[k]);
  }
  const double mean = stats::mean(x);
  const double var = stats::variance(x);
  double m4 = 0.0;
  for (double v : x) m4 += std::pow(v - mean, 4);
  m4 /= static_cast<double>(paths);
  return {var, std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(paths))};
}

}  // namespace

TEST_CASE("jump series") {
  CHECK(BetaSeries::parse("pow:0.6")(8) == doctest::Approx(std::pow(8.0, -0.6)));
  CHECK(!BetaSeries::parse("pow:0.6").length());
  CHECK(BetaSeries::parse("logsq")(3) == doctest::Approx(1.0 / (3.0 * std::pow(std::log(4.0), 2))));
  const auto list = BetaSeries::parse("list:1,0.5");
  CHECK(list.length() == 2);
  CHECK(list(2) == 0.5);
  CHECK(list(3) == 0.0);
  CHECK(BetaSeries::parse("none").length() == 0);
  CHECK(BetaSeries::parse("").length() == 0);
  CHECK_THROWS_AS(BetaSeries::parse("pow:0.4"), Error);
  CHECK_THROWS_AS(BetaSeries::parse("gamma:1"), Error);
  CHECK_THROWS_AS(BetaSeries::parse("list:a"), Error);
}

TEST_CASE("truncation of infinite jump series") {
  const auto p = make_ei_params(0.0, BetaSeries::parse("pow:0.9"));
  CHECK(p.truncation() > 1000);
  CHECK(p.tail_bound <= 1e-4);
  const auto fin = make_ei_params(1.0, BetaSeries::parse("list:1,0.5"));
  CHECK(fin.truncation() == 2);
  CHECK(fin.tail_bound == 0.0);
  CHECK(fin.jump_square_sum() == doctest::Approx(1.25));
  CHECK_THROWS_AS(make_ei_params(-1.0, BetaSeries::parse("none")), Error);
  CHECK_THROWS_AS(make_ei_params(0.0, BetaSeries::parse("list:0.5,1")), Error);
}

TEST_CASE("bridge moments") {
  const Count m = 1024;
  for (const auto& [sigma, beta] : std::vector<std::pair<double, std::string>>{
           {1.0, "none"}, {0.0, "list:1,0.5"}, {1.0, "list:1"}}) {
    const auto p = make_ei_params(sigma, BetaSeries::parse(beta));
    const auto [var, se] = variance_at(p, m, m / 2, 10000, 17);
    const double expected = (sigma * sigma + p.jump_square_sum()) / 4.0;
    INFO("sigma ", sigma, " beta ", beta, " var ", var, " se ", se);
    CHECK(std::abs(var - expected) <= 3.0 * se);
  }
  const auto jump = make_ei_params(0.0, BetaSeries::parse("list:1"));
  const auto [var, se] = variance_at(jump, 4, 1, 10000, 3);
  CHECK(std::abs(var - 0.25 * 0.75) <= 3.0 * se);
}

TEST_CASE("bridge endpoints and trivial parameters") {
  SeededStream rng(1, 0);
  const auto zero = simulate_ei_bridge(make_ei_params(0.0, BetaSeries::parse("none")), 64, rng);
  for (double v : zero.values) CHECK(v == 0.0);
  const auto b = simulate_ei_bridge(make_ei_params(1.0, BetaSeries::parse("list:1")), 64, rng);
  CHECK(b.values.front() == 0.0);
  CHECK(b.values.back() == 0.0);
  CHECK(b.resolution() == 64);
}

TEST_CASE("grid Vervaat transform") {
  const auto v = vervaat_path(GridPath{{0, -1, 1, 0}});
  CHECK(v.rho == 1);
  CHECK(v.path.values == std::vector<double>{0, 2, 1, 0});
  const GridPath excursion{{0, 0.5, 0.25, 0.0}};
  CHECK(vervaat_path(excursion).path.values == excursion.values);
}

TEST_CASE("Vervaat of a Brownian bridge is positive inside") {
  const auto p = make_ei_params(1.0, BetaSeries::parse("none"));
  for (int r = 0; r < 1000; ++r) {
    SeededStream rng(99, static_cast<std::uint64_t>(r));
    const auto e = vervaat_path(simulate_ei_bridge(p, 1024, rng)).path;
    bool positive = e.values.front() == 0.0 && e.values.back() == 0.0;
    for (std::size_t k = 1; k + 1 < e.values.size(); ++k) positive &= e.values[k] > 0.0;
    CHECK(positive);
  }
}

TEST_CASE("Lamperti pair of the semicircle") {
  const auto pair = lamperti_pair(semicircle(1 << 14));
  CHECK(pair.kind == LampertiCase::FiniteExtinction);
  CHECK(std::abs(pair.extinction_time - pi) < 1e-2);
  CHECK(sup_error_sin2(pair.c) <= 5e-3);
  double z_err = 0.0;
  for (std::size_t j = 0; j < pair.z.values.size(); ++j) {
    const double t = std::min(pair.z.dt * static_cast<double>(j), pi);
    z_err = std::max(z_err, std::abs(pair.z.values[j] - std::sin(t) / 2.0));
  }
  CHECK(z_err <= 5e-3);
  for (std::size_t j = 1; j < pair.c.values.size(); ++j) CHECK(pair.c.values[j] >= pair.c.values[j - 1]);
  CHECK(pair.c.values.back() == 1.0);
}

TEST_CASE("Lamperti pair solves the initial value problem") {
  const auto f = semicircle(1 << 12);
  const auto pair = lamperti_pair(f);
  const std::size_t stride = 64;
  for (std::size_t j = 0; j + stride < pair.c.values.size(); j += stride) {
    double integral = 0.0;
    for (std::size_t i = j; i < j + stride; ++i) integral += 0.5 * pair.c.dt * (pair.z.values[i] + pair.z.values[i + 1]);
    CHECK(std::abs(pair.c.values[j + stride] - pair.c.values[j] - integral) < 2e-3);
  }
}

TEST_CASE("divergent reciprocal gives the trivial pair") {
  const auto parabola = GridPath::from_function(1 << 12, [](double s) { return s * (1.0 - s); });
  const auto pair = lamperti_pair(parabola);
  CHECK(pair.diverges_at_zero);
  CHECK(pair.kind == LampertiCase::Trivial);
  for (double v : pair.c.values) CHECK(v == 0.0);
  CHECK(inverse_integral(parabola, 0.0, 0.5).diverges);
  CHECK(!inverse_integral(semicircle(1 << 12), 0.0, 0.5).diverges);
}

TEST_CASE("flat excursion") {
  const double kappa = 2.0;
  const Count m = 1024;
  GridPath f = GridPath::from_function(m, [&](double) { return kappa; });
  f.values.front() = 0.0;
  f.values.back() = 0.0;
  const auto pair = lamperti_pair(f, {.assume_integrable = true});
  CHECK(std::abs(pair.extinction_time - 1.0 / kappa) < 3.0 / (kappa * static_cast<double>(m)));
  const double t = 0.25 / kappa;
  CHECK(pair.c.at(t) == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("shifted solutions") {
  const auto pair = lamperti_pair(semicircle(1 << 14));
  const auto same = shift_solution(pair.c, 0.0);
  CHECK(same.values == pair.c.values);
  CHECK(same.origin == 0.0);
  const auto gone = shift_solution(pair.c, std::numeric_limits<double>::infinity());
  CHECK(gone.at(5.0) == 0.0);
  const auto one = shift_solution(pair.c, 1.0);
  CHECK(one.end() == doctest::Approx(1.0 + pair.extinction_time));
  CHECK(one.at(0.5) == 0.0);
  CHECK(hitting_time(pair.c, 0.5) == doctest::Approx(pi / 2).epsilon(1e-3));
  CHECK(hitting_time(one, 0.5) == 1.0 + hitting_time(pair.c, 0.5));
  for (double lambda : {0.25, 0.5, 3.0}) CHECK(hitting_time(shift_solution(pair.c, lambda), 0.7) == lambda + hitting_time(pair.c, 0.7));
  CHECK_THROWS_AS(shift_solution(pair.c, -1.0), Error);
}

TEST_CASE("hitting times") {
  const Curve identity{0.0, 0.01, {}};
  Curve c = identity;
  for (int j = 0; j <= 200; ++j) c.values.push_back(std::min(1.0, 0.01 * j));
  CHECK(hitting_time(c, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(hitting_time(c, 1.5), Error);
}

TEST_CASE("Euler scheme with unit step is the discrete Lamperti recursion") {
  SeededStream rng(12, 0);
  for (Count k : {2, 3, 5}) {
    const auto t = sample_uniform_tree(gen_kary(k, 3000), rng);
    const auto walk = bfw(t).values;
    const auto profile = discrete_lamperti(walk);
    const auto c = euler_ode(step_function(walk), 1.0);
    REQUIRE(c.values.size() == profile.c.size() + 1);
    CHECK(c.values[0] == 0.0);
    for (std::size_t j = 0; j < profile.c.size(); ++j) CHECK(c.values[j + 1] == static_cast<double>(profile.c[j]));
  }
}

TEST_CASE("Euler refinement on the semicircle") {
  // the starting cell carries an O(sqrt(h)) bias; a fine grid keeps it below
  // the O(step) error of the coarsest-to-finest steps
  const auto f = step_function(semicircle(1 << 22));
  double previous = 1.0;
  double coarsest = 0.0;
  for (int e = 4; e <= 10; ++e) {
    const double step = std::ldexp(1.0, -e);
    const double err = sup_error_sin2(euler_ode(f, step));
    INFO("step 2^-", e, " error ", err);
    CHECK(err < previous);
    if (e == 4) coarsest = err;
    previous = err;
  }
  // first order: six halvings of the step gain about 64
  CHECK(coarsest / previous > 32.0);
  CHECK(euler_ode(StepFunction{0.1, {0.0, 0.0}}, 0.1).values == std::vector<double>{0.0});
}

TEST_CASE("reciprocal integrals") {
  const auto est = inverse_integral(semicircle(1 << 14), 0.0, 1.0);
  CHECK(std::abs(est.value - pi) < 2.0 / std::sqrt(static_cast<double>(1 << 14)));
  const auto one = GridPath::from_function(256, [](double) { return 1.0; });
  CHECK(inverse_integral(one, 0.25, 0.75).value == 0.5);
  CHECK_THROWS_AS(inverse_integral(one, 0.5, 0.25), Error);
  GridPath dip = one;
  dip.values[100] = 0.0;
  CHECK_THROWS_AS(inverse_integral(dip, 0.0, 1.0), Error);
}

TEST_CASE("composition") {
  const auto f = semicircle(1 << 14);
  const auto pair = lamperti_pair(f);
  const auto z = compose(f, pair.c);
  double err = 0.0;
  for (std::size_t j = 0; j < z.values.size(); ++j) err = std::max(err, std::abs(z.values[j] - pair.z.values[j]));
  CHECK(err < 0.02);
  const Count m = 128;
  const auto g = GridPath::from_function(m, [](double s) { return s * s; });
  Curve id{0.0, 1.0 / static_cast<double>(m), {}};
  for (Count k = 0; k <= m; ++k) id.values.push_back(static_cast<double>(k) / static_cast<double>(m));
  CHECK(compose(g, id).values == g.values);
  const auto ones = GridPath::from_function(m, [](double) { return 1.0; });
  for (double v : compose(ones, pair.c).values) CHECK(v == 1.0);
}

TEST_CASE("boundedness verdicts") {
  CHECK(boundedness_criteria(1.0, std::vector<double>{}).verdict == Verdict::Bounded);

  const auto p6 = make_ei_params(0.0, BetaSeries::parse("pow:0.6"));
  const auto r6 = boundedness_criteria(0.0, p6.beta);
  CHECK(r6.verdict == Verdict::Bounded);
  CHECK(r6.alpha_star > 1.5);
  CHECK(r6.alpha_star == doctest::Approx(5.0 / 3.0).epsilon(0.03));

  const auto p9 = make_ei_params(0.0, BetaSeries::parse("pow:0.9"));
  const auto r9 = boundedness_criteria(0.0, p9.beta);
  CHECK(r9.verdict == Verdict::Bounded);
  CHECK(r9.alpha_star <= 1.5);
  REQUIRE(r9.alpha_tilde);
  CHECK(*r9.alpha_tilde == doctest::Approx(1.12));
  CHECK(*r9.alpha_tilde < 1.0 / (2.0 - r9.alpha_star));
  CHECK(*r9.alpha_tilde * 0.9 > 1.0);

  const auto pl = make_ei_params(0.0, BetaSeries::parse("logsq"));
  CHECK(boundedness_criteria(0.0, pl.beta).verdict == Verdict::Inconclusive);
}

TEST_CASE("adding a Brownian part never loses boundedness") {
  for (const char* spec : {"pow:0.6", "pow:0.9", "logsq", "list:1,0.5"}) {
    const auto p = make_ei_params(0.0, BetaSeries::parse(spec));
    CHECK(boundedness_criteria(0.5, p.beta).verdict == Verdict::Bounded);
  }
}
