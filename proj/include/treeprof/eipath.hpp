#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeprof/degseq.hpp"
#include "treeprof/rng.hpp"

namespace treeprof {

/// Non-increasing jump sizes beta_1 >= beta_2 >= ... >= 0, either a finite
/// list or a closed-form infinite sequence.
class BetaSeries {
 public:
  BetaSeries() = default;
  static BetaSeries finite(std::vector<double> beta);
  /// beta_i = i^-a
  static BetaSeries power(double a);
  /// beta_i = 1 / (i log^2(i + 1))
  static BetaSeries log_squared();
  /// "" or "none", "pow:<a>", "logsq", "list:<b1>,<b2>,...". Throws Error{ParseError}.
  static BetaSeries parse(std::string_view spec);

  /// 1-based; 0 past the end of a finite list.
  double operator()(Count i) const;
  std::optional<Count> length() const { return length_; }
  const std::string& spec() const { return spec_; }

 private:
  std::function<double(Count)> term_;
  std::optional<Count> length_ = 0;
  std::string spec_ = "none";
};

inline constexpr double kDefaultTailTolerance = 1e-6;
inline constexpr Count kMaxJumps = 1'000'000;

struct EIParams {
  double sigma = 0.0;
  std::vector<double> beta;  // truncated to J terms
  /// Estimated sum_{j > J} beta_j^2; the discarded part of the bridge has
  /// variance at most tail_bound * t (1 - t).
  double tail_bound = 0.0;

  Count truncation() const { return static_cast<Count>(beta.size()); }
  double jump_square_sum() const;
};

/// Smallest J with tail below `tail_tolerance`, capped at `max_jumps`.
/// Throws Error{ConfigError} on negative sigma, increasing or negative beta,
/// or a divergent sum of squares.
EIParams make_ei_params(double sigma, const BetaSeries& beta, double tail_tolerance = kDefaultTailTolerance,
                        Count max_jumps = kMaxJumps);

/// Values at k/m for k = 0..m.
struct GridPath {
  std::vector<double> values;

  Count resolution() const { return static_cast<Count>(values.size()) - 1; }
  double spacing() const { return 1.0 / static_cast<double>(resolution()); }
  static GridPath from_function(Count m, const std::function<double(double)>& f);
};

/// sigma * (Brownian bridge) + sum_j beta_j (1(U_j <= t) - t) on the grid.
GridPath simulate_ei_bridge(const EIParams& p, Count m, SeededStream& rng);

struct VervaatPath {
  GridPath path;
  Count rho = 0;
};

/// V_k = X_{(k + rho) mod m} - X_rho with rho the first grid minimum on [0, m).
VervaatPath vervaat_path(const GridPath& x);

/// Uniformly spaced samples starting at `origin`: 0 before the origin, the
/// last sample after the end, linear in between.
struct Curve {
  double origin = 0.0;
  double dt = 1.0;
  std::vector<double> values;

  double end() const { return origin + dt * static_cast<double>(values.size() - 1); }
  double at(double t) const;
};

enum class LampertiCase { Trivial, FiniteExtinction, InfiniteHorizon };
std::string_view to_string(LampertiCase c);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // difference with the half-resolution estimate
  bool diverges = false;
};

struct LampertiOptions {
  /// Clamp the endpoint power-law exponents to [0, 0.9] and skip divergence
  /// detection; for random paths known to have an integrable reciprocal.
  bool assume_integrable = false;
  /// Output samples; 0 means the input resolution.
  Count samples = 0;
  /// Added to the path inside the integral of 1/f. For a grid sample of a
  /// path with Brownian part sigma, the grid minimum sits on average
  /// kContinuityCorrection * sigma * sqrt(h) above the true one. A positive
  /// shift also fixes the endpoint exponents at 1/2.
  double continuity_shift = 0.0;
};

/// Expected gap between the discretely sampled and the true minimum of a
/// Brownian path, per unit sigma * sqrt(h); equals -zeta(1/2) / sqrt(2 pi).
inline constexpr double kContinuityCorrection = 0.5825971579390106;

/// continuity_shift for a grid sample of an EI path with Brownian part sigma.
double continuity_shift(double sigma, Count resolution);

struct LampertiPair {
  Curve c;
  Curve z;
  LampertiCase kind = LampertiCase::Trivial;
  double extinction_time = std::numeric_limits<double>::infinity();
  bool diverges_at_zero = false;
  bool diverges_at_one = false;
};

/// c0 is the inverse of i(t) = int_0^t 1/f and z = f o c0.
/// Throws Error{NotAnExcursion} unless f vanishes at both ends and is
/// positive inside.
LampertiPair lamperti_pair(const GridPath& f, const LampertiOptions& options = {});

/// c^lambda(t) = c0((t - lambda)^+); infinity gives the zero curve.
Curve shift_solution(const Curve& c, double lambda);

/// Right-continuous step function: value[k] on [k w, (k+1) w), 0 beyond.
struct StepFunction {
  double width = 1.0;
  std::vector<double> values;

  double domain() const { return width * static_cast<double>(values.size()); }
  double at(double x) const;
};

/// Cells valued max(f_k, f_{k+1}), so that the recursion leaves 0.
StepFunction step_function(const GridPath& f);
/// Cells valued by a lattice walk, width 1.
StepFunction step_function(std::span<const Count> walk);

/// c_0 = 0, c_{k+1} = min(c_k + step f(c_k), domain), until c stops moving
/// or `max_steps` is reached. Sampled at times k * step.
Curve euler_ode(const StepFunction& f, double step, Count max_steps = 100'000'000);

/// int_a^b 1/x with a and b rounded to the grid. Endpoint cells where x
/// vanishes use a local power-law fit.
/// Throws Error{NonPositivePath} if x <= 0 strictly inside, Error{InvalidRange}.
IntegralEstimate inverse_integral(const GridPath& x, double a, double b);

/// First crossing of level x by linear interpolation between samples.
/// Throws Error{LevelNotReached}.
double hitting_time(const Curve& c, double x);

/// t -> f_{floor(c(t) m)} sampled like c.
Curve compose(const GridPath& f, const Curve& c);

enum class Verdict { Bounded, Inconclusive };
std::string_view to_string(Verdict v);

struct BoundednessReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  double alpha_star = 0.0;    // log-log slope of #{i : beta_i > x} against 1/x
  double tail_exponent = 0.0; // p with beta_i ~ i^-p
  std::vector<double> tested_alpha;
  std::optional<double> alpha_tilde;
};

/// Sufficient conditions for int_0^1 1/X < infinity. Never proves the converse.
BoundednessReport boundedness_criteria(double sigma, std::span<const double> beta);

}  // namespace treeprof
