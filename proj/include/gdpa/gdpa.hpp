#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gdpa/metrics.hpp"
#include "gdpa/problem.hpp"
#include "gdpa/solve_result.hpp"
#include "gdpa/vec.hpp"

// Gradient descent / perturbed ascent on
//   F_beta(x, lambda) = f(x) + (beta/2)||[g(x) + (1-tau)lambda/beta]_+||^2
//                       - ||(1-tau)lambda||^2 / (2 beta)
// with one projected-gradient primal step and one damped dual step per iteration.

namespace gdpa {

struct GdpaConfig {
  double tau = 0.1;
  double beta0 = 5.0;  ///< beta_r = beta0 r^(1/3)
  double alpha01 = 0.05;  ///< alpha_r = alpha01 / (alpha02 + alpha03 r^(1/3))
  double alpha02 = 1.0;
  double alpha03 = 1.0;
  std::size_t max_iters = 100000;
  double eps_feas = 1e-6;  ///< T(eps) threshold on ||g_+(x_{r+1})||^2
  double eps_stat = 1e-4;  ///< stop once ||G(x_r, lambda_r)|| is also below this
  /// Every iteration up to record_dense_until is recorded, then every record_every-th.
  std::size_t record_every = 10;
  std::size_t record_dense_until = 1000;
  std::uint64_t seed = 0;
  /// Keep (x_r, lambda_r, beta_r) for every r in the result. Memory heavy.
  bool keep_iterates = false;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  bool should_record(std::size_t r) const;

  /// Step-size presets for the bundled problem classes.
  static GdpaConfig mnpc_preset();
  static GdpaConfig nn_preset();
  static GdpaConfig cmdp_preset();
};

struct StepSizes {
  double alpha;
  double beta;
  double gamma;  ///< always tau / beta
};

/// Step sizes for iteration r >= 1.
StepSizes schedule(const GdpaConfig& cfg, std::size_t r);

using ActiveMask = std::vector<bool>;

/// i is active iff g_i(x_r) + (1 - tau) lambda_i / beta_r > 0 (strictly).
ActiveMask active_set(ConstSpan g_x, ConstSpan lambda, double beta, double tau);

/// P_X(x - alpha (grad f(x) + J(x)^T [(1 - tau) lambda + beta g(x)]_+)).
Vector primal_step(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda, double alpha,
                   double beta, double tau);
Vector primal_step(const ProjectionSpec& set, const PointEvaluation& at, ConstSpan x,
                   ConstSpan lambda, double alpha, double beta, double tau);

/// lambda'_i = max(0, (1 - tau) lambda_i + beta g_next_i) for active i, else 0.
/// g_next is g evaluated at the new primal point x_{r+1}.
Vector dual_step(ConstSpan g_next, ConstSpan lambda, const ActiveMask& mask, double beta, double tau);

struct ValidationReport {
  bool ok = true;
  bool skipped = false;  ///< a needed constant was unknown
  double bound = 0.0;
  std::string message;
};

/// Checks tau > 1 - sigma / sqrt(66 U_J^2 + sigma^2). Violations only warn.
ValidationReport validate_tau(const GdpaConfig& cfg, const ProblemConstants& constants);

/// Checks 1/alpha_r >= L_f + (1 - tau)||lambda_r|| L_J + beta_r U_J L_g at r.
ValidationReport validate_alpha(const GdpaConfig& cfg, const ProblemConstants& constants,
                                double lambda_norm, std::size_t r);

/// Everything the solver knows at the end of iteration r.
struct StepEvent {
  std::size_t r;
  StepSizes steps;
  ConstSpan x;            ///< x_r
  ConstSpan lambda;       ///< lambda_r
  const ActiveMask& mask; ///< active set at x_r
  ConstSpan x_next;
  ConstSpan g_next;       ///< g(x_{r+1})
  ConstSpan lambda_next;
};

using StepObserver = std::function<void(const StepEvent&)>;

/// Runs GDPA from (P_X(x0), lambda0). An empty lambda0 means the zero vector.
/// Numerical failures end the run with Termination::NumericalFailure and the
/// partial trace; invalid arguments throw.
SolveResult solve(const ConstrainedProblem& p, const GdpaConfig& cfg, ConstSpan x0,
                  ConstSpan lambda0 = {}, const StepObserver& observer = {});

}  // namespace gdpa
