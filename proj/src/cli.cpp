#include "treeprof/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <json.hpp>

#include "treeprof/error.hpp"
#include "treeprof/experiments.hpp"
#include "treeprof/io.hpp"
#include "treeprof/parallel.hpp"
#include "treeprof/sampler.hpp"
#include "treeprof/transforms.hpp"

namespace treeprof {

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format;  // empty: CSV for walks and paths, JSON otherwise
  bool strict = false;
  CLI::Option* seed_option = nullptr;
};

// Thrown when --strict turns a divergence flag into a failure.
struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Globals& g, const std::string& text, const std::string& default_name = "") {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::path path(g.out);
  if (!default_name.empty() && (std::filesystem::is_directory(path) || g.out.back() == '/')) path /= default_name;
  io::write_file(path, text);
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::map<Count, double> parse_support(const std::string& text) {
  std::map<Count, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "support entries look like i:weight");
    out[std::stoll(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
  }
  return out;
}

std::string degseq_text(const Globals& g, const DegreeSequence& ds) {
  return g.format == "csv" ? io::degseq_to_csv(ds) : json_text(io::degseq_to_json(ds));
}

PlaneTree read_tree(const std::string& file) {
  const auto text = io::read_file(file);
  try {
    return io::tree_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void setup_degseq(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("degseq", "validate and generate degree sequences");
  cmd->require_subcommand(1);

  auto* validate = cmd->add_subcommand("validate", "check the balance identity of a JSON or CSV file");
  auto file = std::make_shared<std::string>();
  validate->add_option("file", *file)->required();
  validate->callback([&g, file] {
    const auto ds = io::degseq_from_text(io::read_file(*file));
    emit(g, degseq_text(g, ds));
    std::cerr << "valid, size " << ds.size() << "\n";
  });

  auto* gen = cmd->add_subcommand("generate", "build a member of a named family");
  auto family = std::make_shared<FamilySpec>();
  auto n = std::make_shared<Count>(1);
  auto support = std::make_shared<std::string>();
  gen->add_option("--family", family->name, "kary, restricted, powerlaw, sigma_jumps or cgw")->required();
  gen->add_option("--n", *n, "family index (vertices for cgw)")->required();
  gen->add_option("--k", family->k);
  gen->add_option("--alpha", family->alpha);
  gen->add_option("--support", *support, "restricted weights i:w,...");
  gen->add_option("--beta", family->beta, "jump list for sigma_jumps, e.g. list:1,0.5");
  gen->add_option("--mu", family->mu, "offspring probabilities mu_0,mu_1,...")->delimiter(',');
  gen->callback([&g, family, n, support] {
    if (!support->empty()) family->support = parse_support(*support);
    if (family->name == "cgw") {
      const OffspringLaw mu(family->mu);
      SeededStream rng(g.seed, 0);
      emit(g, degseq_text(g, sample_cgw_degree_sequence(mu, *n, rng)));
      return;
    }
    const auto member = family_member(*family, *n);
    emit(g, degseq_text(g, member.ds));
    std::cerr << "size " << member.ds.size() << ", scale " << member.scale << "\n";
  });
}

void setup_tree(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("tree", "profiles, walks and subtree statistics of a tree");
  cmd->require_subcommand(1);
  auto file = std::make_shared<std::string>();

  auto* profile = cmd->add_subcommand("profile", "generation sizes of a tree (JSON array of child counts)");
  profile->add_option("tree", *file)->required();
  profile->callback([&g, file] {
    const auto p = discrete_lamperti(bfw(read_tree(*file)).values);
    emit(g, g.format == "csv" ? io::profile_to_csv(p) : json_text(json{{"z", p.z}, {"c", p.c}}));
  });

  auto* walk = cmd->add_subcommand("walk", "depth-first or breadth-first walk");
  auto kind = std::make_shared<std::string>("dfw");
  walk->add_option("tree", *file)->required();
  walk->add_option("--kind", *kind)->check(CLI::IsMember({"dfw", "bfw"}));
  walk->callback([&g, file, kind] {
    const auto t = read_tree(*file);
    const auto w = *kind == "dfw" ? dfw(t) : bfw(t);
    emit(g, g.format == "json" ? json_text(json(w.values)) : io::walk_to_csv(std::span<const Count>(w.values)));
  });

  auto* stats = cmd->add_subcommand("stats", "band count and half/quarter heights of a subtree");
  auto v = std::make_shared<Count>(1);
  auto h1 = std::make_shared<Count>(0);
  auto h2 = std::make_shared<Count>(-1);
  stats->add_option("tree", *file)->required();
  stats->add_option("--v", *v, "1-based depth-first vertex");
  stats->add_option("--h1", *h1);
  stats->add_option("--h2", *h2, "negative for unbounded");
  stats->callback([&g, file, v, h1, h2] {
    const auto t = read_tree(*file);
    const auto height = heights(t);
    if (*v < 1 || *v > t.size()) throw Error(ErrorCode::InvalidVertex, "vertex out of range");
    const Count lo = std::max(*h1, height[*v - 1]);
    const auto band = subtree_band_count(t, *v, lo, *h2 < 0 ? std::nullopt : std::optional<Count>(*h2));
    const auto quarter = subtree_quarter_height(t, *v);
    json j{{"vertex", *v},
           {"height", height[*v - 1]},
           {"subtree_size", subtree_sizes(t)[*v - 1]},
           {"band_count", band},
           {"half_height", subtree_half_height(t, *v)},
           {"quarter_height", quarter ? json(*quarter) : json(nullptr)},
           {"tree_height", *std::max_element(height.begin(), height.end())}};
    emit(g, json_text(j));
  });
}

void setup_sample(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("sample", "uniform trees with a given degree sequence");
  auto file = std::make_shared<std::string>();
  auto reps = std::make_shared<Count>(1);
  auto per_replicate = std::make_shared<bool>(false);
  cmd->add_option("--degseq", *file, "JSON or CSV degree sequence")->required();
  cmd->add_option("--reps", *reps)->check(CLI::PositiveNumber);
  cmd->add_flag("--per-replicate", *per_replicate, "one profile CSV and tree JSON per replicate (needs --out dir)");
  cmd->callback([&g, file, reps, per_replicate] {
    const auto ds = io::degseq_from_text(io::read_file(*file));
    if (*per_replicate) {
      if (g.out.empty()) throw Error(ErrorCode::ConfigError, "--per-replicate needs --out <dir>");
      for (Count r = 0; r < *reps; ++r) {
        SeededStream rng(g.seed, static_cast<std::uint64_t>(r));
        const auto t = sample_uniform_tree(ds, rng);
        const std::filesystem::path dir(g.out);
        io::write_file(dir / ("profile_" + std::to_string(r) + ".csv"),
                       io::profile_to_csv(discrete_lamperti(bfw(t).values)));
        io::write_file(dir / ("tree_" + std::to_string(r) + ".json"), io::tree_to_json(t).dump() + "\n");
      }
      return;
    }
    const auto batch = sample_batch(ds, *reps, g.seed, g.threads);
    json trees = json::array();
    for (const auto& [degrees, count] : batch.tree_counts) trees.push_back({{"tree", degrees}, {"count", count}});
    json j{{"schema", 1},
           {"degseq", io::degseq_to_json(ds)},
           {"seed", g.seed},
           {"replicates", batch.replicates},
           {"mean_profile", batch.mean_profile()},
           {"heights", batch.max_heights},
           {"trees", trees}};
    emit(g, json_text(j), "summary.json");
  });
}

void setup_transform(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("transform", "path and tree transformations");
  cmd->require_subcommand(1);
  auto file = std::make_shared<std::string>();

  auto* vervaat = cmd->add_subcommand("vervaat", "cyclic shift of a walk (index,value CSV) at its first minimum");
  vervaat->add_option("walk", *file)->required();
  vervaat->callback([&g, file] {
    const auto w = io::walk_from_csv(io::read_file(*file));
    const RealWalk walk{w};
    const auto x = walk.increments();
    const auto r = discrete_vervaat<double>(x);
    const auto out = walk_from<double>(r.increments, w.empty() ? 0.0 : w.front());
    std::cerr << "rho " << r.rho << "\n";
    emit(g, g.format == "json" ? json_text(json{{"rho", r.rho}, {"values", out}}) : io::walk_to_csv(out));
  });

  auto* t213 = cmd->add_subcommand("t213", "213 transformation of a tree (JSON array of child counts)");
  t213->set_help_flag("--help", "print this help message and exit");
  auto v = std::make_shared<Count>(1);
  auto h = std::make_shared<Count>(1);
  auto inverse = std::make_shared<bool>(false);
  t213->add_option("tree", *file)->required();
  t213->add_option("--v", *v)->required();
  t213->add_option("--h", *h)->required();
  t213->add_flag("--inverse", *inverse);
  t213->callback([&g, file, v, h, inverse] {
    const auto t = read_tree(*file);
    const auto out = *inverse ? inverse_213(t, *v, *h) : transform_213(t, *v, *h);
    emit(g, g.format == "csv" ? io::walk_to_csv(std::span<const Count>(dfw(out).values))
                              : io::tree_to_json(out).dump() + "\n");
  });

  auto* fm = cmd->add_subcommand("futuremin", "future-minimum transformation of a real walk (index,value CSV)");
  fm->add_option("walk", *file)->required();
  fm->callback([&g, file] {
    auto w = io::walk_from_csv(io::read_file(*file));
    if (w.empty()) throw Error(ErrorCode::ParseError, "empty walk");
    const double start = w.front();
    for (auto& x : w) x -= start;
    const auto out = future_min_transform(RealWalk{w});
    emit(g, g.format == "json" ? json_text(json{{"values", out.values}}) : io::walk_to_csv(std::span<const double>(out.values)));
  });
}

void setup_eipath(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("eipath", "exchangeable-increment excursions and Lamperti pairs");
  cmd->require_subcommand(1);

  auto* sim = cmd->add_subcommand("simulate", "Vervaat transform of an EI bridge on a grid");
  auto sigma = std::make_shared<double>(1.0);
  auto beta = std::make_shared<std::string>("none");
  auto m = std::make_shared<Count>(1024);
  auto bridge_only = std::make_shared<bool>(false);
  sim->add_option("--sigma", *sigma);
  sim->add_option("--beta", *beta, "none, pow:<a>, logsq or list:b1,b2,...");
  sim->add_option("--m", *m, "grid resolution");
  sim->add_flag("--bridge", *bridge_only, "skip the Vervaat transform");
  sim->callback([&g, sigma, beta, m, bridge_only] {
    const auto params = make_ei_params(*sigma, BetaSeries::parse(*beta));
    SeededStream rng(g.seed, 0);
    auto path = simulate_ei_bridge(params, *m, rng);
    Count rho = 0;
    if (!*bridge_only) {
      auto v = vervaat_path(path);
      path = std::move(v.path);
      rho = v.rho;
    }
    if (!g.out.empty() && std::filesystem::is_directory(g.out)) {
      const std::filesystem::path dir(g.out);
      io::write_file(dir / "path.csv", io::grid_path_to_csv(path));
      json manifest{{"sigma", *sigma},     {"beta", *beta},           {"truncation", params.truncation()},
                    {"tail_bound", params.tail_bound}, {"seed", g.seed}, {"m", *m},
                    {"rho", rho}};
      io::write_file(dir / "manifest.json", json_text(manifest));
      return;
    }
    emit(g, io::grid_path_to_csv(path));
  });

  auto* lam = cmd->add_subcommand("lamperti", "Lamperti pair of an excursion (t,value CSV)");
  auto file = std::make_shared<std::string>();
  auto assume = std::make_shared<bool>(false);
  lam->add_option("path", *file)->required();
  lam->add_flag("--assume-integrable", *assume);
  lam->callback([&g, file, assume] {
    const auto f = io::grid_path_from_csv(io::read_file(*file));
    LampertiOptions options;
    options.assume_integrable = *assume;
    const auto pair = lamperti_pair(f, options);
    std::cerr << "case " << to_string(pair.kind) << ", extinction " << pair.extinction_time << ", diverges at 0: "
              << (pair.diverges_at_zero ? "yes" : "no") << ", at 1: " << (pair.diverges_at_one ? "yes" : "no") << "\n";
    if (g.format == "json") {
      emit(g, json_text(json{{"case", std::string(to_string(pair.kind))},
                             {"extinction_time", std::isfinite(pair.extinction_time) ? json(pair.extinction_time)
                                                                                     : json(nullptr)},
                             {"diverges_at_zero", pair.diverges_at_zero},
                             {"diverges_at_one", pair.diverges_at_one},
                             {"dt", pair.c.dt},
                             {"c", pair.c.values},
                             {"z", pair.z.values}}));
    } else {
      std::string out = "t,c,z\n";
      for (std::size_t j = 0; j < pair.c.values.size(); ++j)
        out += io::format_double(pair.c.dt * static_cast<double>(j)) + "," + io::format_double(pair.c.values[j]) + "," +
               io::format_double(pair.z.values[j]) + "\n";
      emit(g, out);
    }
    if (g.strict && (pair.diverges_at_zero || pair.diverges_at_one))
      throw StrictFailure("divergent integral of 1/f");
  });

  auto* bounded = cmd->add_subcommand("bounded", "sufficient conditions for an integrable 1/X");
  auto bsigma = std::make_shared<double>(0.0);
  auto bbeta = std::make_shared<std::string>("none");
  auto beta_file = std::make_shared<std::string>();
  auto max_jumps = std::make_shared<Count>(kMaxJumps);
  bounded->add_option("--sigma", *bsigma);
  bounded->add_option("--beta", *bbeta, "none, pow:<a>, logsq or list:b1,b2,...");
  bounded->add_option("--beta-file", *beta_file, "one jump size per line");
  bounded->add_option("--max-jumps", *max_jumps);
  bounded->callback([&g, bsigma, bbeta, beta_file, max_jumps] {
    EIParams params;
    if (!beta_file->empty()) {
      params = make_ei_params(*bsigma, BetaSeries::finite(io::walk_from_csv(io::read_file(*beta_file))));
    } else {
      params = make_ei_params(*bsigma, BetaSeries::parse(*bbeta), kDefaultTailTolerance, *max_jumps);
    }
    const auto r = boundedness_criteria(params.sigma, params.beta);
    json j{{"verdict", std::string(to_string(r.verdict))},
           {"reason", r.reason},
           {"alpha_star", r.alpha_star},
           {"tail_exponent", r.tail_exponent},
           {"alpha_tilde", r.alpha_tilde ? json(*r.alpha_tilde) : json(nullptr)},
           {"tested_alpha", r.tested_alpha},
           {"truncation", params.truncation()},
           {"tail_bound", params.tail_bound}};
    emit(g, json_text(j));
  });
}

void setup_experiment(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("experiment", "convergence and invariance experiments");
  cmd->require_subcommand(1);

  auto* conv = cmd->add_subcommand("convergence", "rescaled profiles against the limit Lamperti pair");
  auto cfg = std::make_shared<ExperimentConfig>();
  auto config_file = std::make_shared<std::string>();
  auto support = std::make_shared<std::string>();
  conv->add_option("--config", *config_file, "JSON config; flags given explicitly override it");
  conv->add_option("--family", cfg->family.name);
  conv->add_option("--k", cfg->family.k);
  conv->add_option("--alpha", cfg->family.alpha);
  conv->add_option("--support", *support);
  conv->add_option("--beta", cfg->family.beta);
  conv->add_option("--mu", cfg->family.mu)->delimiter(',');
  conv->add_option("--sizes", cfg->sizes)->delimiter(',');
  conv->add_option("--scaling", cfg->scaling);
  conv->add_option("--reps", cfg->replicates);
  conv->add_option("--limit-reps", cfg->limit_replicates);
  conv->add_option("--grid", cfg->grid);
  conv->add_option("--time-points", cfg->time_points);
  conv->add_option("--limit", cfg->limit);
  conv->add_option("--max-jumps", cfg->max_jumps);
  conv->callback([&g, cfg, config_file, support, conv] {
    ExperimentConfig run = *cfg;
    if (!config_file->empty()) {
      json j;
      try {
        j = json::parse(io::read_file(*config_file));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, e.what());
      }
      run = config_from_json(j);
      auto given = [&](const char* name) { return conv->count(name) > 0; };
      if (given("--family")) run.family.name = cfg->family.name;
      if (given("--k")) run.family.k = cfg->family.k;
      if (given("--alpha")) run.family.alpha = cfg->family.alpha;
      if (given("--beta")) run.family.beta = cfg->family.beta;
      if (given("--mu")) run.family.mu = cfg->family.mu;
      if (given("--sizes")) run.sizes = cfg->sizes;
      if (given("--scaling")) run.scaling = cfg->scaling;
      if (given("--reps")) run.replicates = cfg->replicates;
      if (given("--limit-reps")) run.limit_replicates = cfg->limit_replicates;
      if (given("--grid")) run.grid = cfg->grid;
      if (given("--time-points")) run.time_points = cfg->time_points;
      if (given("--limit")) run.limit = cfg->limit;
      if (given("--max-jumps")) run.max_jumps = cfg->max_jumps;
    }
    if (!support->empty()) run.family.support = parse_support(*support);
    if (g.seed_option && g.seed_option->count() > 0) run.seed = g.seed;
    if (!g.out.empty()) run.output = g.out;
    const auto start = std::chrono::steady_clock::now();
    const unsigned threads = resolve_threads(g.threads);
    const auto report = run_convergence(run, threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_convergence(report, run.output, seconds, threads);
    std::cerr << "wrote " << (run.output / "report.json").string() << "\n";
    if (g.strict && report.boundedness && report.boundedness->verdict != Verdict::Bounded)
      throw StrictFailure("limit boundedness is inconclusive");
  });

  auto* cgw = cmd->add_subcommand("cgw", "conditioned Galton-Watson trees");
  auto mu = std::make_shared<std::vector<double>>();
  auto sizes = std::make_shared<std::vector<Count>>();
  auto reps = std::make_shared<Count>(500);
  cgw->add_option("--mu", *mu)->delimiter(',')->required();
  cgw->add_option("--sizes", *sizes)->delimiter(',')->required();
  cgw->add_option("--reps", *reps);
  cgw->callback([&g, mu, sizes, reps] {
    const auto start = std::chrono::steady_clock::now();
    const unsigned threads = resolve_threads(g.threads);
    auto report = run_cgw(OffspringLaw(*mu), *sizes, *reps, g.seed, threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::filesystem::path dir = g.out.empty() ? std::filesystem::path("out") : std::filesystem::path(g.out);
    write_convergence(report, dir, seconds, threads);
    std::cerr << "wrote " << (dir / "report.json").string() << "\n";
  });

  auto* inv = cmd->add_subcommand("invariance", "law invariance under the 213 transformation");
  inv->set_help_flag("--help", "print this help message and exit");
  auto file = std::make_shared<std::string>();
  auto h = std::make_shared<Count>(1);
  auto mode = std::make_shared<std::string>("exact");
  auto ireps = std::make_shared<Count>(100000);
  inv->add_option("--degseq", *file)->required();
  inv->add_option("--h", *h);
  inv->add_option("--mode", *mode)->check(CLI::IsMember({"exact", "mc"}));
  inv->add_option("--reps", *ireps);
  inv->callback([&g, file, h, mode, ireps] {
    const auto ds = io::degseq_from_text(io::read_file(*file));
    const auto r = run_213_invariance(ds, *h, *mode, *ireps, g.seed, g.threads);
    emit(g, json_text(r.to_json()), "invariance.json");
  });

  auto* fm = cmd->add_subcommand("futuremin", "future minimum after the minimum against the maximum at d");
  auto jumps = std::make_shared<std::vector<double>>();
  auto n = std::make_shared<Count>(2000);
  auto freps = std::make_shared<Count>(2000);
  fm->add_option("--jumps", *jumps, "exhaustive check over all orderings")->delimiter(',');
  fm->add_option("--n", *n, "Monte Carlo size when no jumps are given");
  fm->add_option("--reps", *freps);
  fm->callback([&g, jumps, n, freps] {
    const auto r = jumps->empty() ? run_futuremin_mc(*n, *freps, g.seed, g.threads) : run_futuremin_check(*jumps);
    emit(g, json_text(r.to_json()), "futuremin.json");
  });
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Random plane trees with given degree sequences: sampling, profiles and scaling limits"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  g.seed_option = app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads, "worker threads (default: TREEPROF_THREADS or all cores)");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--format", g.format)->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--strict", g.strict, "exit 2 when a divergence flag fires");
  setup_degseq(app, g);
  setup_tree(app, g);
  setup_sample(app, g);
  setup_transform(app, g);
  setup_eipath(app, g);
  setup_experiment(app, g);
  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (auto* leaf : sub->get_subcommands({})) leaf->fallthrough();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const StrictFailure& e) {
    std::cerr << "strict: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace treeprof
