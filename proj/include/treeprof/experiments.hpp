#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treeprof/degseq.hpp"
#include "treeprof/eipath.hpp"
#include "treeprof/tree.hpp"

namespace treeprof {

/// Degree-sequence family indexed by n.
///   kary:        gen_kary(k, n), b_n = sqrt(n)
///   restricted:  N_i = floor(w_i n) for the weights in `support`, b_n = sqrt(n)
///   powerlaw:    gen_powerlaw(alpha, n), b_n = floor(n^alpha)
///   sigma_jumps: gen_kary(k, n) plus hubs floor(beta_j sqrt(s)), b_n = sqrt(s of the base)
///   cgw:         n vertices, Galton-Watson with offspring law `mu`, b_n = sqrt(n)
struct FamilySpec {
  std::string name = "kary";
  Count k = 2;
  double alpha = 0.6;
  std::map<Count, double> support;
  std::string beta = "none";  // jump list for sigma_jumps
  std::vector<double> mu;

  bool operator==(const FamilySpec&) const = default;
};

struct ExperimentConfig {
  FamilySpec family;
  std::vector<Count> sizes;
  /// "default" (per family), "sqrt_n" or "sqrt_size".
  std::string scaling = "default";
  Count replicates = 500;
  Count limit_replicates = 2000;
  /// Grid resolution of the simulated limit paths.
  Count grid = 1024;
  /// Samples of the reported curves.
  Count time_points = 400;
  /// Right end of the curve grid; 0 picks it from the limit side.
  double horizon = 0.0;
  /// Level at which every cumulative profile is aligned.
  double align_level = 0.05;
  /// Limit parameters; empty means the family's own ones.
  std::optional<double> limit_sigma;
  std::optional<std::string> limit_beta;
  /// "simulate" or "none" (only cross-size trends).
  std::string limit = "simulate";
  Count max_jumps = 100'000;
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults. Throws Error{ConfigError}.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Throws Error{ConfigError}.
void validate_config(const ExperimentConfig& cfg);

/// Declared limit (sigma, beta) of a family, before any override.
struct LimitParams {
  double sigma = 0.0;
  std::string beta = "none";
};
LimitParams family_limit(const FamilySpec& family);

/// Member n of a deterministic family together with its scale b_n.
struct FamilyMember {
  DegreeSequence ds;
  double scale;
};
FamilyMember family_member(const FamilySpec& family, Count n, const std::string& scaling = "default");

struct SizeSummary {
  Count n = 0;
  double mean_size = 0.0;
  double scale = 0.0;
  Count replicates = 0;
  double mean_hitting_time = 0.0;  // of the alignment level
  double plateau = 0.0;            // |mean hitting time - limit mean hitting time|
  double sup_distance = 0.0;       // aligned mean C against the limit (or the previous size)
  double sup_distance_raw = 0.0;   // unaligned mean C
  struct Ks {
    double t;
    double statistic;
    double p_value;
  };
  std::vector<Ks> ks;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::optional<HypothesisReport> hypotheses;
  LimitParams limit;
  std::optional<EIParams> limit_params;
  std::optional<BoundednessReport> boundedness;
  double median_extinction = 0.0;
  double limit_mean_hitting_time = 0.0;
  std::vector<double> times;     // common grid for C and Z
  std::vector<double> x_times;   // grid of [0, 1] for X
  /// series name -> size label -> mean values; size label "limit" for the limit side
  std::map<std::string, std::map<std::string, std::vector<double>>> curves;
  std::vector<SizeSummary> sizes;
  bool distance_decreasing = false;
  bool plateau_decreasing = false;

  nlohmann::json to_json() const;
  std::string curves_csv() const;
};

/// Comparison of rescaled tree profiles with the Lamperti pair
/// of the limit excursion. Throws Error{ConfigError}.
ConvergenceReport run_convergence(const ExperimentConfig& cfg, unsigned threads = 0);

/// Conditioned Galton-Watson trees. A periodic law is accepted when every
/// size is 1 modulo its period.
/// Throws Error{NotCritical}, Error{NotAperiodic}, Error{RejectionBudgetExceeded}.
ConvergenceReport run_cgw(const OffspringLaw& mu, const std::vector<Count>& sizes, Count replicates,
                          std::uint64_t seed, unsigned threads = 0);

struct InvarianceReport {
  std::string mode;
  Count h = 0;
  Count trees = 0;
  Count pairs = 0;
  Count mismatches = 0;
  std::vector<double> p_values;  // mc mode: height, width
  bool invariant = false;

  nlohmann::json to_json() const;
};

inline constexpr Count kExactInvarianceLimit = 8;

/// exact: push the uniform measure on (tree, vertex) through the 213
/// transformation in rational arithmetic. mc: chi-square of height and width
/// between uniform trees and independently transformed uniform trees.
/// Throws Error{SizeTooLarge} in exact mode above kExactInvarianceLimit.
InvarianceReport run_213_invariance(const DegreeSequence& ds, Count h, const std::string& mode, Count reps,
                                    std::uint64_t seed, unsigned threads = 0);

struct FutureMinReport {
  std::string mode;
  Count n = 0;
  Count cases = 0;
  Count pathwise_failures = 0;
  bool multiset_equal = false;
  std::vector<SizeSummary::Ks> ks;  // mc mode
  bool passed = false;

  nlohmann::json to_json() const;
};

/// Exhaustive over all orderings of `jumps` (at most 6). Jumps are rounded to
/// multiples of 2^-32 so all partial sums are exact.
/// Throws Error{TiedExtremum} on equal subset sums, Error{SizeTooLarge}.
FutureMinReport run_futuremin_check(std::vector<double> jumps);
/// Random orderings of n Gaussian jumps, KS at t in {0.1, 0.5, 0.9}.
FutureMinReport run_futuremin_mc(Count n, Count reps, std::uint64_t seed, unsigned threads = 0);

/// Sup-distance between two mean curves of `series` (C, C_aligned, Z or X),
/// the second interpolated linearly onto the time grid of the first and held
/// constant past its end. Throws Error{ConfigError} on a missing curve.
double curve_distance(const ConvergenceReport& a, const std::string& label_a, const ConvergenceReport& b,
                      const std::string& label_b, const std::string& series = "C");

/// Writes report.json, curves.csv and run_meta.json (timing, threads) into dir.
void write_convergence(const ConvergenceReport& report, const std::filesystem::path& dir, double seconds,
                       unsigned threads);

}  // namespace treeprof
