#include "gdpa/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gdpa/errors.hpp"
#include "gdpa/metrics.hpp"

namespace gdpa {

void PenaltyConfig::validate() const {
  if (!(rho0 > 0.0)) throw std::invalid_argument("penalty config: rho0 must be positive");
  if (!(rho_growth > 1.0)) throw std::invalid_argument("penalty config: rho_growth must exceed 1");
  if (!(inner_step > 0.0)) throw std::invalid_argument("penalty config: inner_step must be positive");
  if (!(feas_tol > 0.0)) throw std::invalid_argument("penalty config: feas_tol must be positive");
  if (inner_iters == 0 || outer_iters == 0) {
    throw std::invalid_argument("penalty config: iteration counts must be positive");
  }
  if (record_every == 0) throw std::invalid_argument("penalty config: record_every must be positive");
}

void AlmConfig::validate() const {
  PenaltyConfig::validate();
  if (!(stall_ratio > 0.0 && stall_ratio <= 1.0)) {
    throw std::invalid_argument("alm config: stall_ratio must lie in (0, 1]");
  }
}

namespace {

bool should_record(const PenaltyConfig& cfg, std::size_t r) {
  return r <= cfg.record_dense_until || r % cfg.record_every == 0;
}

std::size_t budget_of(const PenaltyConfig& cfg) {
  const std::size_t planned = cfg.outer_iters * cfg.inner_iters;
  return cfg.max_grad_evals == 0 ? planned : std::min(planned, cfg.max_grad_evals);
}

// Shared double loop. `multiplier` maps (g(x), lambda, rho) to the vector that
// multiplies J^T in the inner gradient; `dual_update` runs after each inner
// loop and returns whether the outer loop may stop.
template <class Multiplier, class OuterUpdate>
SolveResult run_double_loop(const ConstrainedProblem& p, const PenaltyConfig& cfg, ConstSpan x0,
                            Vector lambda, double record_tau, Multiplier multiplier,
                            OuterUpdate outer_update) {
  p.validate();
  require_same_size(x0.size(), p.dim, "baseline: x0");
  const std::size_t budget = budget_of(cfg);

  SolveResult out;
  Vector x = p.projection.project(x0);
  double rho = cfg.rho0;
  std::size_t r = 0;
  bool stop = false;

  try {
    for (std::size_t outer = 0; outer < cfg.outer_iters && r < budget && !stop; ++outer) {
      const double step = cfg.inner_step / (1.0 + rho);
      for (std::size_t inner = 0; inner < cfg.inner_iters && r < budget; ++inner) {
        ++r;
        PointEvaluation at;
        at.grad_f = p.grad_f(x);
        at.g = p.g(x);
        at.jacobian = p.jacobian(x);
        if (should_record(cfg, r)) {
          at.f = p.f(x);
          out.trace.push_back(make_record(r, p.projection, at, x, lambda, step, rho, 0.0, record_tau));
        }
        if (!out.T_eps && norm2(positive_part(at.g)) <= cfg.feas_tol) out.T_eps = r;

        Vector direction = at.grad_f;
        if (p.num_constraints > 0) {
          axpy_inplace(1.0, transpose_times(at.jacobian, multiplier(at.g, lambda, rho)), direction);
        }
        x = p.projection.project(axpy(-step, direction, x));
        out.iterations = r;
        out.final_alpha = step;
        out.final_beta = rho;
      }
      stop = outer_update(x, lambda, rho);
    }
    out.termination = stop ? Termination::FeasibilityStop : Termination::BudgetExhausted;
  } catch (const NumericalFailure& e) {
    out.termination = Termination::NumericalFailure;
    out.message = "inner step " + std::to_string(r) + ": " + e.what();
  }

  out.x_final = x;
  out.lambda_final = lambda;
  out.x_avg = x;
  out.lambda_avg = lambda;
  return out;
}

}  // namespace

SolveResult solve_penalty(const ConstrainedProblem& p, const PenaltyConfig& cfg, ConstSpan x0) {
  cfg.validate();
  const Vector no_dual(p.num_constraints, 0.0);
  auto multiplier = [](const Vector& g, const Vector&, double rho) {
    return scaled(rho, positive_part(g));
  };
  auto outer_update = [&](const Vector& x, Vector&, double& rho) {
    if (norm2(positive_part(p.g(x))) <= cfg.feas_tol) return true;
    rho *= cfg.rho_growth;
    return false;
  };
  return run_double_loop(p, cfg, x0, no_dual, 0.0, multiplier, outer_update);
}

SolveResult solve_alm(const ConstrainedProblem& p, const AlmConfig& cfg, ConstSpan x0,
                      ConstSpan lambda0) {
  cfg.validate();
  Vector lambda(p.num_constraints, 0.0);
  if (!lambda0.empty()) {
    require_same_size(lambda0.size(), p.num_constraints, "solve_alm: lambda0");
    for (double v : lambda0) {
      if (!(v >= 0.0)) throw std::invalid_argument("solve_alm: lambda0 must be nonnegative");
    }
    lambda.assign(lambda0.begin(), lambda0.end());
  }

  // grad of (rho/2)||[g + lambda/rho]_+||^2 is J^T [lambda + rho g]_+
  auto multiplier = [](const Vector& g, const Vector& lam, double rho) {
    return positive_part(axpy(rho, g, lam));
  };
  double last_violation = std::numeric_limits<double>::infinity();
  auto outer_update = [&](const Vector& x, Vector& lam, double& rho) {
    const Vector g = p.g(x);
    const double violation = norm2(positive_part(g));
    lam = positive_part(axpy(rho, g, lam));
    const bool done = violation <= cfg.feas_tol && slackness(lam, g) <= cfg.feas_tol;
    if (violation > cfg.stall_ratio * last_violation) rho *= cfg.rho_growth;
    last_violation = violation;
    return done;
  };
  return run_double_loop(p, cfg, x0, lambda, 0.0, multiplier, outer_update);
}

}  // namespace gdpa
