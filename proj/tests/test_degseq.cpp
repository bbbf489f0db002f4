#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "treeprof/degseq.hpp"
#include "treeprof/error.hpp"
#include "treeprof/stats.hpp"

using namespace treeprof;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("validate accepts balanced counts") {
  const auto fig = DegreeSequence::validate({{0, 5}, {1, 2}, {2, 2}, {3, 1}});
  CHECK(fig.size() == 10);
  CHECK(fig.max_degree() == 3);
  const auto kary = DegreeSequence::validate({{2, 3}, {0, 4}});
  CHECK(kary.size() == 7);
  CHECK(DegreeSequence::validate({{0, 1}, {4, 0}}).counts().size() == 1);
}

TEST_CASE("validate rejects bad counts") {
  CHECK(code_of([] { DegreeSequence::validate({{0, 2}}); }) == ErrorCode::BalanceViolation);
  CHECK(code_of([] { DegreeSequence::validate({}); }) == ErrorCode::Empty);
  CHECK(code_of([] { DegreeSequence::validate({{0, 0}}); }) == ErrorCode::Empty);
  CHECK(code_of([] { DegreeSequence::validate({{0, -1}}); }) == ErrorCode::ParseError);
  CHECK(code_of([] { DegreeSequence::validate({{0, 1LL << 62}, {1LL << 40, 1LL << 40}}); }) == ErrorCode::Overflow);
}

TEST_CASE("child sequence") {
  using V = std::vector<Count>;
  CHECK(child_sequence(DegreeSequence::validate({{0, 5}, {1, 2}, {2, 2}, {3, 1}})) == V{3, 2, 2, 1, 1, 0, 0, 0, 0, 0});
  CHECK(child_sequence(DegreeSequence::validate({{0, 1}})) == V{0});
  CHECK(child_sequence(DegreeSequence::validate({{2, 3}, {0, 4}})) == V{2, 2, 2, 0, 0, 0, 0});
}

TEST_CASE("counts and child sequences round trip for every size up to 9") {
  for (Count s = 1; s <= 9; ++s) {
    const auto all = all_degree_sequences(s);
    CHECK(!all.empty());
    for (const auto& ds : all) {
      CHECK(ds.size() == s);
      const auto d = child_sequence(ds);
      CHECK(static_cast<Count>(d.size()) == s);
      CHECK(degree_sequence_of(d) == ds);
    }
  }
  // partitions of s - 1 into at most s parts
  CHECK(all_degree_sequences(5).size() == 5);
  CHECK(all_degree_sequences(7).size() == 11);
}

TEST_CASE("k-ary sequences") {
  CHECK(gen_kary(2, 4) == DegreeSequence::validate({{2, 4}, {0, 5}}));
  CHECK(gen_kary(1, 5) == DegreeSequence::validate({{1, 5}, {0, 1}}));
  CHECK(gen_kary(3, 2) == DegreeSequence::validate({{3, 2}, {0, 5}}));
  for (Count k = 1; k <= 5; ++k)
    for (Count n = 1; n <= 20; ++n) CHECK(gen_kary(k, n).size() == 1 + n * k);
  CHECK(gen_kary(2, 3).degree_square_sum() == doctest::Approx(1 + 2 * 3));
}

TEST_CASE("restricted sequences close the balance with leaves") {
  const auto ds = gen_restricted({{1, 2}, {3, 4}});
  CHECK(ds.count(0) == 1 + 2 * 4);
  CHECK(ds.count(1) == 2);
  CHECK(ds.size() == 2 + 4 + 9);
}

TEST_CASE("power-law hubs") {
  const auto p = gen_powerlaw(0.6, 100);
  CHECK(p.scale == 15);
  Count expected_hubs = 0;
  Count excess = 0;
  std::map<Count, Count> degrees;
  for (Count j = 1; std::pow(static_cast<double>(j), -0.6) * 15.0 >= 1.0 - 1e-12; ++j) {
    const auto d = static_cast<Count>(std::floor(15.0 * std::pow(static_cast<double>(j), -0.6) + 1e-9));
    ++expected_hubs;
    excess += d - 1;
    ++degrees[d];
  }
  CHECK(p.hubs == expected_hubs);
  CHECK(p.hubs == static_cast<Count>(std::floor(std::pow(15.0, 5.0 / 3.0) + 1e-9)));
  CHECK(p.ds.count(0) == 1 + excess);
  for (auto [d, n] : degrees)
    if (d > 0) CHECK(p.ds.count(d) == n);

  const auto tiny = gen_powerlaw(0.9, 2);
  CHECK(tiny.scale == 1);
  CHECK(tiny.hubs == 1);
  CHECK(tiny.hub_degrees == std::vector<Count>{1});
  CHECK(tiny.ds.size() == 2);
}

TEST_CASE("sigma plus jumps") {
  const auto base = gen_kary(2, 1000);
  const double root = std::sqrt(static_cast<double>(base.size()));
  const std::vector<double> beta{1.0};
  const auto ds = gen_sigma_plus_jumps(base, beta, 1);
  const auto d = static_cast<Count>(std::floor(root));
  CHECK(d == 44);
  CHECK(ds.count(d) == 1);
  CHECK(ds.count(0) == base.count(0) + d - 1);
  CHECK(gen_sigma_plus_jumps(base, std::vector<double>{}, 0) == base);
  // size inflation equals the total hub degree
  const std::vector<double> many{1.0, 0.5, 0.25};
  const auto big = gen_sigma_plus_jumps(base, many, 3);
  Count total = 0;
  for (double b : many) total += static_cast<Count>(std::floor(b * root));
  CHECK(big.size() - base.size() == total);
  CHECK_THROWS_AS(gen_sigma_plus_jumps(base, std::vector<double>{0.5, 1.0}, 2), Error);
}

TEST_CASE("offspring laws") {
  const OffspringLaw binary({0.5, 0.0, 0.5});
  CHECK(binary.is_critical());
  CHECK(binary.variance() == doctest::Approx(1.0));
  CHECK(binary.period() == 2);
  CHECK(!binary.is_aperiodic());
  const OffspringLaw geometric({0.5, 0.25, 0.125, 0.0625, 0.0625});
  CHECK(geometric.is_aperiodic());
  CHECK_THROWS_AS(OffspringLaw({0.5, 0.2}), Error);
}

TEST_CASE("conditioned Galton-Watson counts") {
  const OffspringLaw binary({0.5, 0.0, 0.5});
  SeededStream rng(11, 0);
  for (int i = 0; i < 50; ++i)
    CHECK(sample_cgw_degree_sequence(binary, 3, rng) == DegreeSequence::validate({{0, 2}, {2, 1}}));
  CHECK(code_of([&] { sample_cgw_degree_sequence(binary, 4, rng, 1000); }) == ErrorCode::RejectionBudgetExceeded);
}

TEST_CASE("conditioned Galton-Watson law matches brute force") {
  // mu uniform on {0,1,2}, n = 3: enumerate the 27 outcomes
  const std::vector<double> mu{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::map<std::map<Count, Count>, double> exact;
  double total = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        if (a + b + c != 2) continue;
        std::map<Count, Count> counts;
        ++counts[a];
        ++counts[b];
        ++counts[c];
        exact[counts] += mu[a] * mu[b] * mu[c];
        total += mu[a] * mu[b] * mu[c];
      }
  REQUIRE(exact.size() == 2);
  std::vector<double> probs;
  std::map<std::map<Count, Count>, std::size_t> index;
  for (auto& [k, p] : exact) {
    index[k] = probs.size();
    probs.push_back(p / total);
  }
  std::vector<std::int64_t> observed(probs.size(), 0);
  SeededStream rng(5, 0);
  const OffspringLaw law(mu);
  for (int r = 0; r < 100000; ++r) ++observed[index.at(sample_cgw_degree_sequence(law, 3, rng).counts())];
  CHECK(stats::chi_square_gof(observed, probs).p_value > 1e-3);
}

TEST_CASE("hypothesis diagnostics") {
  std::vector<DegreeSequence> family;
  std::vector<double> scales;
  for (Count n : {100, 1000, 10000}) {
    family.push_back(gen_kary(2, n));
    scales.push_back(std::sqrt(static_cast<double>(n)));
  }
  const auto r = hypothesis_diagnostics(family, scales);
  CHECK(r.size_diverges);
  CHECK(r.variance_statistic.back() == doctest::Approx(2.0).epsilon(0.01));
  CHECK(r.hub_ratios.back().front() < 0.05);
  CHECK(r.unbounded_variation);
  CHECK(!r.degenerate);

  std::vector<DegreeSequence> same(3, gen_kary(2, 50));
  std::vector<double> same_scales(3, std::sqrt(50.0));
  CHECK(!hypothesis_diagnostics(same, same_scales).size_diverges);

  std::vector<DegreeSequence> paths;
  for (Count n : {100, 1000, 10000}) paths.push_back(gen_kary(1, n));
  CHECK(hypothesis_diagnostics(paths, scales).degenerate);
}

TEST_CASE("power-law hub ratios follow j^-alpha") {
  std::vector<DegreeSequence> family;
  std::vector<double> scales;
  for (Count n : {1000, 10000, 100000}) {
    const auto p = gen_powerlaw(0.6, n);
    family.push_back(p.ds);
    scales.push_back(static_cast<double>(p.scale));
  }
  const auto r = hypothesis_diagnostics(family, scales);
  for (int j = 1; j <= 5; ++j)
    CHECK(r.beta_estimate[j - 1] == doctest::Approx(std::pow(j, -0.6)).epsilon(0.05));
}
