#include "treeprof/experiments.hpp"

#include <algorithm>
#include <boost/rational.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "treeprof/error.hpp"
#include "treeprof/io.hpp"
#include "treeprof/parallel.hpp"
#include "treeprof/sampler.hpp"
#include "treeprof/stats.hpp"
#include "treeprof/transforms.hpp"

namespace treeprof {

using nlohmann::json;

namespace {

constexpr std::uint64_t kLimitStreams = std::uint64_t{1} << 63;
constexpr std::uint64_t kDiagnosticStreams = std::uint64_t{1} << 62;
constexpr std::uint64_t kSecondSampleStreams = std::uint64_t{1} << 61;
constexpr std::uint64_t kJumpStreams = std::uint64_t{1} << 60;

std::uint64_t size_stream(std::size_t size_index, Count replicate) {
  return (static_cast<std::uint64_t>(size_index) << 32) | static_cast<std::uint64_t>(replicate);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
  json support = json::object();
  for (auto [i, w] : cfg.family.support) support[std::to_string(i)] = w;
  json j{
      {"family",
       {{"name", cfg.family.name},
        {"k", cfg.family.k},
        {"alpha", cfg.family.alpha},
        {"support", support},
        {"beta", cfg.family.beta},
        {"mu", cfg.family.mu}}},
      {"sizes", cfg.sizes},
      {"scaling", cfg.scaling},
      {"replicates", cfg.replicates},
      {"limit_replicates", cfg.limit_replicates},
      {"grid", cfg.grid},
      {"time_points", cfg.time_points},
      {"horizon", cfg.horizon},
      {"align_level", cfg.align_level},
      {"limit_sigma", cfg.limit_sigma ? json(*cfg.limit_sigma) : json(nullptr)},
      {"limit_beta", cfg.limit_beta ? json(*cfg.limit_beta) : json(nullptr)},
      {"limit", cfg.limit},
      {"max_jumps", cfg.max_jumps},
      {"seed", cfg.seed},
      {"output", cfg.output.string()},
  };
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  ExperimentConfig cfg;
  if (j.contains("family")) {
    const auto& f = j["family"];
    if (!f.is_object()) throw Error(ErrorCode::ConfigError, "family must be an object");
    cfg.family.name = get_or(f, "name", cfg.family.name);
    cfg.family.k = get_or(f, "k", cfg.family.k);
    cfg.family.alpha = get_or(f, "alpha", cfg.family.alpha);
    cfg.family.beta = get_or(f, "beta", cfg.family.beta);
    cfg.family.mu = get_or(f, "mu", cfg.family.mu);
    if (f.contains("support")) {
      for (const auto& [key, value] : f["support"].items()) {
        try {
          cfg.family.support[std::stoll(key)] = value.get<double>();
        } catch (const std::exception&) {
          throw Error(ErrorCode::ConfigError, "bad support entry '" + key + "'");
        }
      }
    }
  }
  cfg.sizes = get_or(j, "sizes", cfg.sizes);
  cfg.scaling = get_or(j, "scaling", cfg.scaling);
  cfg.replicates = get_or(j, "replicates", cfg.replicates);
  cfg.limit_replicates = get_or(j, "limit_replicates", cfg.limit_replicates);
  cfg.grid = get_or(j, "grid", cfg.grid);
  cfg.time_points = get_or(j, "time_points", cfg.time_points);
  cfg.horizon = get_or(j, "horizon", cfg.horizon);
  cfg.align_level = get_or(j, "align_level", cfg.align_level);
  if (j.contains("limit_sigma") && !j["limit_sigma"].is_null()) cfg.limit_sigma = get_or(j, "limit_sigma", 0.0);
  if (j.contains("limit_beta") && !j["limit_beta"].is_null())
    cfg.limit_beta = get_or(j, "limit_beta", std::string());
  cfg.limit = get_or(j, "limit", cfg.limit);
  cfg.max_jumps = get_or(j, "max_jumps", cfg.max_jumps);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.output = get_or(j, "output", cfg.output.string());
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  static const std::set<std::string> families{"kary", "restricted", "powerlaw", "sigma_jumps", "cgw"};
  if (!families.contains(cfg.family.name)) fail("unknown family '" + cfg.family.name + "'");
  if (cfg.sizes.empty()) fail("size ladder is empty");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] < 1) fail("sizes must be positive");
    if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1]) fail("size ladder must be strictly increasing");
  }
  if (cfg.scaling != "default" && cfg.scaling != "sqrt_n" && cfg.scaling != "sqrt_size")
    fail("scaling must be default, sqrt_n or sqrt_size");
  if (cfg.replicates < 1) fail("replicates must be at least 1");
  if (cfg.limit != "simulate" && cfg.limit != "none") fail("limit must be simulate or none");
  if (cfg.limit == "simulate" && cfg.limit_replicates < 1) fail("limit_replicates must be at least 1");
  if (cfg.grid < 64) fail("grid must be at least 64");
  if (cfg.time_points < 2) fail("time_points must be at least 2");
  if (!(cfg.horizon >= 0.0)) fail("horizon must be non-negative");
  if (!(cfg.align_level > 0.0 && cfg.align_level < 1.0)) fail("align_level must lie in (0, 1)");
  if (cfg.max_jumps < 4) fail("max_jumps must be at least 4");
  if (cfg.family.name == "cgw" && cfg.family.mu.empty()) fail("cgw family needs an offspring law mu");
  if (cfg.family.name == "restricted" && cfg.family.support.empty()) fail("restricted family needs a support");
}

LimitParams family_limit(const FamilySpec& f) {
  LimitParams p;
  const auto k = static_cast<double>(f.k);
  if (f.name == "kary") {
    p.sigma = std::sqrt(k * (k - 1.0));
  } else if (f.name == "restricted") {
    double s2 = 0.0;
    for (auto [i, w] : f.support) s2 += static_cast<double>(i) * static_cast<double>(i - 1) * w;
    p.sigma = std::sqrt(s2);
  } else if (f.name == "powerlaw") {
    p.sigma = 0.0;
    p.beta = "pow:" + io::format_double(f.alpha);
  } else if (f.name == "sigma_jumps") {
    p.sigma = std::sqrt(k - 1.0);
    p.beta = f.beta;
  } else if (f.name == "cgw") {
    p.sigma = std::sqrt(OffspringLaw(f.mu).variance());
  } else {
    throw Error(ErrorCode::ConfigError, "unknown family '" + f.name + "'");
  }
  return p;
}

FamilyMember family_member(const FamilySpec& f, Count n, const std::string& scaling) {
  auto member = [&]() -> FamilyMember {
    const double root_n = std::sqrt(static_cast<double>(n));
    if (f.name == "kary") return {gen_kary(f.k, n), root_n};
    if (f.name == "restricted") {
      std::map<Count, Count> inner;
      for (auto [i, w] : f.support) inner[i] = static_cast<Count>(std::floor(w * static_cast<double>(n)));
      return {gen_restricted(inner), root_n};
    }
    if (f.name == "powerlaw") {
      auto p = gen_powerlaw(f.alpha, n);
      return {p.ds, static_cast<double>(p.scale)};
    }
    if (f.name == "sigma_jumps") {
      const auto base = gen_kary(f.k, n);
      const auto beta = BetaSeries::parse(f.beta);
      std::vector<double> list;
      for (Count j = 1; j <= beta.length().value_or(0); ++j) list.push_back(beta(j));
      return {gen_sigma_plus_jumps(base, list, static_cast<Count>(list.size())),
              std::sqrt(static_cast<double>(base.size()))};
    }
    throw Error(ErrorCode::ConfigError, "family '" + f.name + "' has random members");
  }();
  if (scaling == "sqrt_n") member.scale = std::sqrt(static_cast<double>(n));
  if (scaling == "sqrt_size") member.scale = std::sqrt(static_cast<double>(member.ds.size()));
  return member;
}

namespace {

struct TreeCurves {
  Curve c;
  Curve z;
  std::vector<double> x;  // on the X grid
  double size = 0.0;
  double hit = 0.0;
};

struct LimitCurves {
  Curve c;
  Curve z;
  std::vector<double> x;
  double extinction = 0.0;
  double hit = 0.0;
};

std::vector<double> uniform_grid(double end, Count points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (Count j = 0; j < points; ++j) t[j] = end * static_cast<double>(j) / static_cast<double>(points - 1);
  return t;
}

TreeCurves tree_curves(const PlaneTree& tree, double b, const std::vector<double>& x_times, double level) {
  const auto walk = bfw(tree).values;
  const auto profile = discrete_lamperti(walk);
  const auto s = static_cast<double>(tree.size());
  TreeCurves out;
  out.size = s;
  out.c = Curve{0.0, b / s, {}};
  out.z = Curve{0.0, b / s, {}};
  for (std::size_t k = 0; k < profile.z.size(); ++k) {
    out.c.values.push_back(static_cast<double>(profile.c[k]) / s);
    out.z.values.push_back(static_cast<double>(profile.z[k]) / b);
  }
  out.c.values.push_back(1.0);
  out.z.values.push_back(0.0);
  for (double u : x_times) {
    const auto i = std::min(static_cast<std::size_t>(std::floor(u * s)), walk.size() - 1);
    out.x.push_back(static_cast<double>(walk[i]) / b);
  }
  out.hit = hitting_time(out.c, level);
  return out;
}

std::vector<double> mean_on(const std::vector<double>& times, Count reps, const auto& eval) {
  std::vector<double> m(times.size(), 0.0);
  for (Count r = 0; r < reps; ++r)
    for (std::size_t j = 0; j < times.size(); ++j) m[j] += eval(r, times[j]);
  for (auto& v : m) v /= static_cast<double>(reps);
  return m;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& cfg, unsigned threads) {
  validate_config(cfg);
  threads = resolve_threads(threads);
  ConvergenceReport report;
  report.config = cfg;
  const auto& family = cfg.family;
  const bool random_members = family.name == "cgw";
  std::optional<OffspringLaw> mu;
  if (random_members) {
    mu.emplace(family.mu);
    if (!mu->is_critical()) throw Error(ErrorCode::NotCritical, "offspring mean is " + std::to_string(mu->mean()));
    const Count period = mu->period();
    for (Count n : cfg.sizes)
      if (period == 0 || (n - 1) % period != 0)
        throw Error(ErrorCode::NotAperiodic, "offspring law has period " + std::to_string(period) +
                                                 "; size " + std::to_string(n) + " is unreachable");
  }

  // hypothesis diagnostics on one member per size
  std::vector<DegreeSequence> members;
  std::vector<double> scales;
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    const Count n = cfg.sizes[i];
    if (random_members) {
      SeededStream rng(cfg.seed, kDiagnosticStreams | i);
      members.push_back(sample_cgw_degree_sequence(*mu, n, rng));
      scales.push_back(cfg.scaling == "sqrt_size" ? std::sqrt(static_cast<double>(members.back().size()))
                                                  : std::sqrt(static_cast<double>(n)));
    } else {
      auto m = family_member(family, n, cfg.scaling);
      members.push_back(m.ds);
      scales.push_back(m.scale);
    }
  }
  if (members.size() >= 3) {
    report.hypotheses = hypothesis_diagnostics(members, scales);
    if (report.hypotheses->degenerate)
      throw Error(ErrorCode::ConfigError, "family has a bounded-variation (degenerate) limit; hypotheses fail");
  }

  // limit side
  report.limit = family_limit(family);
  if (!random_members && cfg.scaling != "default") {
    // the declared limit assumes the family's own scale
    const Count top = cfg.sizes.back();
    const double ratio = family_member(family, top).scale / family_member(family, top, cfg.scaling).scale;
    if (ratio != 1.0) {
      report.limit.sigma *= ratio;
      if (report.limit.beta != "none" && !cfg.limit_beta)
        throw Error(ErrorCode::ConfigError, "non-default scaling with jumps needs an explicit limit_beta");
    }
  }
  if (cfg.limit_sigma) report.limit.sigma = *cfg.limit_sigma;
  if (cfg.limit_beta) report.limit.beta = *cfg.limit_beta;
  const auto x_times = uniform_grid(1.0, cfg.time_points);
  report.x_times = x_times;
  std::vector<LimitCurves> limit;
  if (cfg.limit == "simulate") {
    report.limit_params =
        make_ei_params(report.limit.sigma, BetaSeries::parse(report.limit.beta), kDefaultTailTolerance, cfg.max_jumps);
    report.boundedness = boundedness_criteria(report.limit_params->sigma, report.limit_params->beta);
    LampertiOptions options;
    options.assume_integrable = report.boundedness->verdict == Verdict::Bounded;
    options.continuity_shift = continuity_shift(report.limit_params->sigma, cfg.grid);
    limit.resize(static_cast<std::size_t>(cfg.limit_replicates));
    const auto& params = *report.limit_params;
    parallel_for(cfg.limit_replicates, threads, [&](Count r) {
      SeededStream rng(cfg.seed, kLimitStreams | static_cast<std::uint64_t>(r));
      const auto excursion = vervaat_path(simulate_ei_bridge(params, cfg.grid, rng)).path;
      auto pair = lamperti_pair(excursion, options);
      auto& out = limit[r];
      for (double u : x_times) {
        const double g = u * static_cast<double>(cfg.grid);
        const auto k = std::min(static_cast<Count>(g), cfg.grid - 1);
        out.x.push_back(excursion.values[k] + (g - static_cast<double>(k)) * (excursion.values[k + 1] - excursion.values[k]));
      }
      out.extinction = pair.extinction_time;
      out.hit = hitting_time(pair.c, cfg.align_level);
      out.c = std::move(pair.c);
      out.z = std::move(pair.z);
    });
  }

  // finite side
  std::vector<std::vector<TreeCurves>> trees(cfg.sizes.size());
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    trees[i].resize(static_cast<std::size_t>(cfg.replicates));
    const Count n = cfg.sizes[i];
    std::optional<FamilyMember> fixed;
    if (!random_members) fixed = family_member(family, n, cfg.scaling);
    parallel_for(cfg.replicates, threads, [&](Count r) {
      SeededStream rng(cfg.seed, size_stream(i, r));
      PlaneTree tree = fixed ? sample_uniform_tree(fixed->ds, rng)
                             : sample_uniform_tree(sample_cgw_degree_sequence(*mu, n, rng), rng);
      const double b = fixed ? fixed->scale
                             : (cfg.scaling == "sqrt_size" ? std::sqrt(static_cast<double>(tree.size()))
                                                           : std::sqrt(static_cast<double>(n)));
      trees[i][r] = tree_curves(tree, b, x_times, cfg.align_level);
    });
  }

  // common grid
  double horizon = cfg.horizon;
  if (!limit.empty()) {
    std::vector<double> ext;
    std::vector<double> hits;
    for (const auto& l : limit) {
      ext.push_back(std::isfinite(l.extinction) ? l.extinction : l.c.end());
      hits.push_back(l.hit);
    }
    report.median_extinction = stats::quantile(ext, 0.5);
    report.limit_mean_hitting_time = stats::mean(hits);
    if (horizon == 0.0) horizon = 1.25 * stats::quantile(ext, 0.99);
  } else if (horizon == 0.0) {
    std::vector<double> ends;
    for (const auto& per_size : trees)
      for (const auto& t : per_size) ends.push_back(t.c.end());
    horizon = 1.25 * stats::quantile(ends, 0.99);
  }
  report.times = uniform_grid(horizon, cfg.time_points);
  const auto& times = report.times;

  auto add_series = [&](const std::string& label, const auto& reps, Count count) {
    report.curves["C"][label] = mean_on(times, count, [&](Count r, double t) { return reps[r].c.at(t); });
    report.curves["C_aligned"][label] =
        mean_on(times, count, [&](Count r, double t) { return reps[r].c.at(reps[r].hit + t); });
    report.curves["Z"][label] = mean_on(times, count, [&](Count r, double t) { return reps[r].z.at(t); });
    std::vector<double> x(x_times.size(), 0.0);
    for (Count r = 0; r < count; ++r)
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += reps[r].x[j];
    for (auto& v : x) v /= static_cast<double>(count);
    report.curves["X"][label] = std::move(x);
  };
  if (!limit.empty()) add_series("limit", limit, cfg.limit_replicates);

  std::vector<double> ks_times;
  if (!limit.empty())
    for (double f : {0.25, 0.5, 1.0}) ks_times.push_back(f * report.median_extinction);

  std::vector<double> distances;
  std::vector<double> plateaus;
  std::string previous;
  double previous_hit = 0.0;
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    const auto label = std::to_string(cfg.sizes[i]);
    const auto& reps = trees[i];
    add_series(label, reps, cfg.replicates);
    SizeSummary row;
    row.n = cfg.sizes[i];
    row.replicates = cfg.replicates;
    std::vector<double> hits;
    double total_size = 0.0;
    for (const auto& t : reps) {
      hits.push_back(t.hit);
      total_size += t.size;
    }
    row.mean_size = total_size / static_cast<double>(cfg.replicates);
    row.scale = reps.front().c.dt * reps.front().size;
    row.mean_hitting_time = stats::mean(hits);
    const std::string reference = limit.empty() ? previous : "limit";
    if (!reference.empty()) {
      row.sup_distance = sup_distance(report.curves["C_aligned"][label], report.curves["C_aligned"][reference]);
      row.sup_distance_raw = sup_distance(report.curves["C"][label], report.curves["C"][reference]);
      row.plateau = std::abs(row.mean_hitting_time - (limit.empty() ? previous_hit : report.limit_mean_hitting_time));
      distances.push_back(row.sup_distance);
      plateaus.push_back(row.plateau);
    }
    for (double t : ks_times) {
      std::vector<double> a;
      std::vector<double> b;
      for (const auto& r : reps) a.push_back(r.c.at(t));
      for (const auto& l : limit) b.push_back(l.c.at(t));
      const auto test = stats::ks_two_sample(a, b);
      row.ks.push_back({t, test.statistic, test.p_value});
    }
    report.sizes.push_back(std::move(row));
    previous = label;
    previous_hit = report.sizes.back().mean_hitting_time;
  }
  report.distance_decreasing = distances.size() >= 2 && strictly_decreasing(distances);
  report.plateau_decreasing = plateaus.size() >= 2 && strictly_decreasing(plateaus);
  return report;
}

ConvergenceReport run_cgw(const OffspringLaw& mu, const std::vector<Count>& sizes, Count replicates,
                          std::uint64_t seed, unsigned threads) {
  ExperimentConfig cfg;
  cfg.family.name = "cgw";
  cfg.family.mu = mu.probabilities();
  cfg.sizes = sizes;
  cfg.replicates = replicates;
  cfg.seed = seed;
  return run_convergence(cfg, threads);
}

double curve_distance(const ConvergenceReport& a, const std::string& label_a, const ConvergenceReport& b,
                      const std::string& label_b, const std::string& series) {
  auto lookup = [&](const ConvergenceReport& r, const std::string& label) -> const std::vector<double>& {
    const auto s = r.curves.find(series);
    if (s == r.curves.end() || !s->second.contains(label))
      throw Error(ErrorCode::ConfigError, "no curve " + series + "/" + label);
    return s->second.at(label);
  };
  const auto& ya = lookup(a, label_a);
  const auto& yb = lookup(b, label_b);
  const auto& ta = series == "X" ? a.x_times : a.times;
  const auto& tb = series == "X" ? b.x_times : b.times;
  double d = 0.0;
  for (std::size_t j = 0; j < ta.size(); ++j) {
    const double t = ta[j];
    double v;
    if (t >= tb.back()) {
      v = yb.back();
    } else {
      const auto k = static_cast<std::size_t>(std::upper_bound(tb.begin(), tb.end(), t) - tb.begin()) - 1;
      const double w = (t - tb[k]) / (tb[k + 1] - tb[k]);
      v = yb[k] + w * (yb[k + 1] - yb[k]);
    }
    d = std::max(d, std::abs(ya[j] - v));
  }
  return d;
}

namespace {

json hypotheses_json(const HypothesisReport& h) {
  return json{{"sizes", h.sizes},
              {"scales", h.scales},
              {"hub_ratios", h.hub_ratios},
              {"variance_statistic", h.variance_statistic},
              {"size_over_scale", h.size_over_scale},
              {"size_diverges", h.size_diverges},
              {"size_over_scale_diverges", h.size_over_scale_diverges},
              {"beta_estimate", h.beta_estimate},
              {"variance_limit", h.variance_limit},
              {"sigma2_estimate", h.sigma2_estimate},
              {"unbounded_variation", h.unbounded_variation},
              {"degenerate", h.degenerate},
              {"notes", h.notes}};
}

json boundedness_json(const BoundednessReport& b) {
  return json{{"label", "sufficient-condition check"},
              {"verdict", std::string(to_string(b.verdict))},
              {"reason", b.reason},
              {"alpha_star", b.alpha_star},
              {"tail_exponent", b.tail_exponent},
              {"tested_alpha", b.tested_alpha},
              {"alpha_tilde", b.alpha_tilde ? json(*b.alpha_tilde) : json(nullptr)}};
}

json ks_json(const std::vector<SizeSummary::Ks>& ks) {
  json out = json::array();
  for (const auto& k : ks) out.push_back({{"t", k.t}, {"statistic", k.statistic}, {"p_value", k.p_value}});
  return out;
}

}  // namespace

json ConvergenceReport::to_json() const {
  json j;
  j["schema"] = 1;
  j["kind"] = "convergence";
  j["distance"] =
      "sup-distance of mean curves on a common grid plus fixed-time two-sample tests; weaker than the "
      "Skorohod topology";
  j["config"] = config_to_json(config);
  j["hypotheses"] = hypotheses ? hypotheses_json(*hypotheses) : json{{"notes", {"fewer than 3 sizes"}}};
  json lim{{"mode", config.limit}, {"sigma", limit.sigma}, {"beta", limit.beta}};
  if (limit_params) {
    lim["truncation"] = limit_params->truncation();
    lim["tail_bound"] = limit_params->tail_bound;
    lim["replicates"] = config.limit_replicates;
    lim["median_extinction"] = median_extinction;
    lim["mean_hitting_time"] = limit_mean_hitting_time;
  }
  if (boundedness) lim["boundedness"] = boundedness_json(*boundedness);
  j["limit"] = lim;
  json rows = json::array();
  for (const auto& s : sizes) {
    rows.push_back({{"n", s.n},
                    {"mean_size", s.mean_size},
                    {"scale", s.scale},
                    {"replicates", s.replicates},
                    {"mean_hitting_time", s.mean_hitting_time},
                    {"plateau", s.plateau},
                    {"sup_distance", s.sup_distance},
                    {"sup_distance_raw", s.sup_distance_raw},
                    {"ks", ks_json(s.ks)}});
  }
  j["sizes"] = rows;
  j["distance_decreasing"] = distance_decreasing;
  j["plateau_decreasing"] = plateau_decreasing;
  return j;
}

std::string ConvergenceReport::curves_csv() const {
  std::string out = "t,series,size,value\n";
  for (const auto& [series, by_size] : curves) {
    const auto& grid = series == "X" ? x_times : times;
    for (const auto& [label, values] : by_size)
      for (std::size_t j = 0; j < values.size(); ++j)
        out += io::format_double(grid[j]) + "," + series + "," + label + "," + io::format_double(values[j]) + "\n";
  }
  return out;
}

json InvarianceReport::to_json() const {
  return json{{"schema", 1},         {"kind", "213-invariance"}, {"mode", mode},
              {"h", h},              {"trees", trees},           {"pairs", pairs},
              {"mismatches", mismatches}, {"p_values", p_values}, {"invariant", invariant}};
}

InvarianceReport run_213_invariance(const DegreeSequence& ds, Count h, const std::string& mode, Count reps,
                                    std::uint64_t seed, unsigned threads) {
  if (h < 1) throw Error(ErrorCode::InvalidRange, "h must be at least 1");
  InvarianceReport r;
  r.mode = mode;
  r.h = h;
  const Count s = ds.size();
  if (mode == "exact") {
    if (s > kExactInvarianceLimit)
      throw Error(ErrorCode::SizeTooLarge, "exact mode needs size <= " + std::to_string(kExactInvarianceLimit));
    using Weight = boost::rational<Count>;
    const auto trees = enumerate_trees(ds, kExactInvarianceLimit);
    r.trees = static_cast<Count>(trees.size());
    const Weight each(1, r.trees * s);
    std::map<std::pair<std::vector<Count>, Count>, Weight> pushed;
    for (const auto& t : trees)
      for (Count v = 1; v <= s; ++v) pushed[{transform_213(t, v, h).dfs_degrees(), v}] += each;
    r.pairs = r.trees * s;
    for (const auto& t : trees)
      for (Count v = 1; v <= s; ++v) {
        const auto it = pushed.find({t.dfs_degrees(), v});
        if (it == pushed.end() || it->second != each) ++r.mismatches;
      }
    r.mismatches += static_cast<Count>(pushed.size()) > r.pairs ? static_cast<Count>(pushed.size()) - r.pairs : 0;
    r.invariant = r.mismatches == 0;
    return r;
  }
  if (mode != "mc") throw Error(ErrorCode::ConfigError, "mode must be exact or mc");
  if (reps < 1) throw Error(ErrorCode::ConfigError, "reps must be positive");
  r.pairs = reps;
  std::vector<std::array<Count, 2>> plain(static_cast<std::size_t>(reps));
  std::vector<std::array<Count, 2>> moved(static_cast<std::size_t>(reps));
  auto shape = [](const PlaneTree& t) {
    const auto p = counted_profile(t);
    return std::array<Count, 2>{static_cast<Count>(p.z.size()) - 1, *std::max_element(p.z.begin(), p.z.end())};
  };
  parallel_for(reps, resolve_threads(threads), [&](Count i) {
    SeededStream a(seed, static_cast<std::uint64_t>(i));
    plain[i] = shape(sample_uniform_tree(ds, a));
    SeededStream b(seed, kSecondSampleStreams | static_cast<std::uint64_t>(i));
    const auto t = sample_uniform_tree(ds, b);
    const auto v = 1 + static_cast<Count>(b.uniform01() * static_cast<double>(s));
    moved[i] = shape(transform_213(t, v, h));
  });
  r.invariant = true;
  for (int stat = 0; stat < 2; ++stat) {
    Count top = 0;
    for (Count i = 0; i < reps; ++i) top = std::max({top, plain[i][stat], moved[i][stat]});
    std::vector<std::int64_t> ca(static_cast<std::size_t>(top) + 1, 0);
    std::vector<std::int64_t> cb(static_cast<std::size_t>(top) + 1, 0);
    for (Count i = 0; i < reps; ++i) {
      ++ca[plain[i][stat]];
      ++cb[moved[i][stat]];
    }
    const auto test = stats::chi_square_two_sample(ca, cb);
    r.p_values.push_back(test.p_value);
    r.invariant = r.invariant && test.p_value > 1e-3;
  }
  return r;
}

json FutureMinReport::to_json() const {
  return json{{"schema", 1},
              {"kind", "future-minimum"},
              {"mode", mode},
              {"n", n},
              {"cases", cases},
              {"pathwise_failures", pathwise_failures},
              {"multiset_equal", multiset_equal},
              {"ks", ks_json(ks)},
              {"passed", passed}};
}

FutureMinReport run_futuremin_check(std::vector<double> jumps) {
  const auto n = jumps.size();
  if (n == 0) throw Error(ErrorCode::ConfigError, "need at least one jump");
  if (n > 6) throw Error(ErrorCode::SizeTooLarge, "exhaustive check limited to 6 jumps");
  for (auto& x : jumps) x = std::ldexp(std::round(std::ldexp(x, 32)), -32);
  std::set<double> sums;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) sum += jumps[i];
    if (!sums.insert(sum).second) throw Error(ErrorCode::TiedExtremum, "two subsets of the jumps have equal sums");
  }
  FutureMinReport r;
  r.mode = "exact";
  r.n = static_cast<Count>(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> left;
  std::vector<std::vector<double>> right;
  do {
    std::vector<double> x;
    for (auto i : order) x.push_back(jumps[i]);
    const auto w = real_walk(x);
    auto lhs = post_min_future_min_path(w.values);
    if (max_at_d_path(future_min_transform(w).values) != lhs) ++r.pathwise_failures;
    left.push_back(std::move(lhs));
    right.push_back(max_at_d_path(w.values));
    ++r.cases;
  } while (std::next_permutation(order.begin(), order.end()));
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  r.multiset_equal = left == right;
  r.passed = r.multiset_equal && r.pathwise_failures == 0;
  return r;
}

FutureMinReport run_futuremin_mc(Count n, Count reps, std::uint64_t seed, unsigned threads) {
  if (n < 2 || reps < 2) throw Error(ErrorCode::ConfigError, "need n >= 2 and reps >= 2");
  FutureMinReport r;
  r.mode = "mc";
  r.n = n;
  r.cases = reps;
  std::vector<double> jumps(static_cast<std::size_t>(n));
  {
    SeededStream rng(seed, kJumpStreams);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    for (auto& x : jumps) x = normal(rng);
  }
  const std::vector<double> fractions{0.1, 0.5, 0.9};
  auto sample_at = [&](const std::vector<double>& path) {
    std::vector<double> v;
    for (double f : fractions) {
      const auto i = std::min(static_cast<std::size_t>(f * static_cast<double>(n)), path.size() - 1);
      v.push_back(path[i]);
    }
    return v;
  };
  std::vector<std::vector<double>> left(static_cast<std::size_t>(reps));
  std::vector<std::vector<double>> right(static_cast<std::size_t>(reps));
  parallel_for(reps, resolve_threads(threads), [&](Count i) {
    auto x = jumps;
    SeededStream a(seed, static_cast<std::uint64_t>(i));
    std::shuffle(x.begin(), x.end(), a);
    left[i] = sample_at(post_min_future_min_path(real_walk(x).values));
    SeededStream b(seed, kSecondSampleStreams | static_cast<std::uint64_t>(i));
    std::shuffle(x.begin(), x.end(), b);
    right[i] = sample_at(max_at_d_path(real_walk(x).values));
  });
  r.passed = true;
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    std::vector<double> a;
    std::vector<double> b;
    for (Count i = 0; i < reps; ++i) {
      a.push_back(left[i][f]);
      b.push_back(right[i][f]);
    }
    const auto test = stats::ks_two_sample(a, b);
    r.ks.push_back({fractions[f], test.statistic, test.p_value});
    r.passed = r.passed && test.p_value > 1e-3;
  }
  r.multiset_equal = r.passed;
  return r;
}

void write_convergence(const ConvergenceReport& report, const std::filesystem::path& dir, double seconds,
                       unsigned threads) {
  io::write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  io::write_file(dir / "curves.csv", report.curves_csv());
  const json meta{{"seconds", seconds}, {"threads", threads}};
  io::write_file(dir / "run_meta.json", meta.dump(2) + "\n");
}

}  // namespace treeprof
