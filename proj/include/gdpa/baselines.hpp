#pragma once

#include <cstddef>

#include "gdpa/problem.hpp"
#include "gdpa/solve_result.hpp"

// Simplified double-loop comparison solvers. They use fixed inner iteration
// counts and plain projected gradient steps (no momentum, no line search), so
// they reproduce the shape of penalty / augmented-Lagrangian methods rather
// than any particular published code.
//
// Both emit the same trace schema as gdpa::solve. `r` counts inner steps,
// alpha is the inner step size actually used, beta is the penalty rho and
// gamma is 0.

namespace gdpa {

struct PenaltyConfig {
  double rho0 = 1.0;
  double rho_growth = 10.0;
  std::size_t inner_iters = 1000;
  /// Base inner step; the step used at penalty rho is inner_step / (1 + rho).
  double inner_step = 0.4;
  std::size_t outer_iters = 6;
  double feas_tol = 1e-3;
  /// Hard cap on total inner steps (0 = outer_iters * inner_iters).
  std::size_t max_grad_evals = 0;
  std::size_t record_every = 10;
  std::size_t record_dense_until = 1000;

  void validate() const;
};

struct AlmConfig : PenaltyConfig {
  AlmConfig() {
    outer_iters = 20;
    inner_iters = 500;
  }

  /// rho grows by rho_growth when ||g_+|| fails to shrink below this factor of
  /// its previous outer value.
  double stall_ratio = 0.9;

  void validate() const;
};

/// Quadratic penalty: inner projected-gradient minimization of
/// f + (rho_k / 2)||g_+||^2 with rho_k = rho0 growth^k, stopping once
/// ||g_+|| <= feas_tol.
SolveResult solve_penalty(const ConstrainedProblem& p, const PenaltyConfig& cfg, ConstSpan x0);

/// Inexact augmented Lagrangian with the classical update
/// lambda <- [lambda + rho g(x)]_+.
SolveResult solve_alm(const ConstrainedProblem& p, const AlmConfig& cfg, ConstSpan x0,
                      ConstSpan lambda0 = {});

}  // namespace gdpa
