#include "gdpa/gdpa.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gdpa/errors.hpp"

namespace gdpa {

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::FeasibilityStop:
      return "feasibility-stop";
    case Termination::BudgetExhausted:
      return "budget-exhausted";
    case Termination::NumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

void GdpaConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("gdpa config: ") + name + " must be positive and finite");
    }
  };
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("gdpa config: tau must lie in (0, 1)");
  positive(beta0, "beta0");
  positive(alpha01, "alpha01");
  positive(alpha02, "alpha02");
  positive(alpha03, "alpha03");
  positive(eps_feas, "eps_feas");
  positive(eps_stat, "eps_stat");
  if (max_iters == 0) throw std::invalid_argument("gdpa config: max_iters must be positive");
  if (record_every == 0) throw std::invalid_argument("gdpa config: record_every must be positive");
}

bool GdpaConfig::should_record(std::size_t r) const {
  return r <= record_dense_until || r % record_every == 0;
}

GdpaConfig GdpaConfig::mnpc_preset() {
  GdpaConfig c;
  c.alpha01 = 0.1;
  c.beta0 = 1e-4;
  return c;
}

GdpaConfig GdpaConfig::nn_preset() {
  GdpaConfig c;
  c.alpha01 = 2e-4;
  c.beta0 = 2e-4;
  return c;
}

GdpaConfig GdpaConfig::cmdp_preset() {
  GdpaConfig c;
  c.alpha01 = 1e3;
  c.beta0 = 0.5;
  return c;
}

StepSizes schedule(const GdpaConfig& cfg, std::size_t r) {
  if (r == 0) throw std::invalid_argument("schedule: iterations are numbered from 1");
  const double root = std::cbrt(static_cast<double>(r));
  StepSizes s;
  s.beta = cfg.beta0 * root;
  s.gamma = cfg.tau / s.beta;
  s.alpha = cfg.alpha01 / (cfg.alpha02 + cfg.alpha03 * root);
  return s;
}

ActiveMask active_set(ConstSpan g_x, ConstSpan lambda, double beta, double tau) {
  require_same_size(g_x.size(), lambda.size(), "active_set");
  ActiveMask mask(g_x.size());
  const double shift = (1.0 - tau) / beta;
  for (std::size_t i = 0; i < g_x.size(); ++i) mask[i] = g_x[i] + shift * lambda[i] > 0.0;
  return mask;
}

Vector primal_step(const ProjectionSpec& set, const PointEvaluation& at, ConstSpan x,
                   ConstSpan lambda, double alpha, double beta, double tau) {
  require_same_size(x.size(), at.grad_f.size(), "primal_step");
  require_same_size(lambda.size(), at.g.size(), "primal_step");
  if (lambda.empty()) return set.project(axpy(-alpha, at.grad_f, x));

  // [(1 - tau) lambda + beta g]_+
  const Vector multiplier = positive_part(axpy(beta, at.g, scaled(1.0 - tau, lambda)));
  Vector direction = at.grad_f;
  axpy_inplace(1.0, transpose_times(at.jacobian, multiplier), direction);
  return set.project(axpy(-alpha, direction, x));
}

Vector primal_step(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda, double alpha,
                   double beta, double tau) {
  PointEvaluation at;
  at.grad_f = p.grad_f(x);
  at.g = p.g(x);
  at.jacobian = p.jacobian(x);
  return primal_step(p.projection, at, x, lambda, alpha, beta, tau);
}

Vector dual_step(ConstSpan g_next, ConstSpan lambda, const ActiveMask& mask, double beta, double tau) {
  require_same_size(g_next.size(), lambda.size(), "dual_step");
  require_same_size(mask.size(), lambda.size(), "dual_step mask");
  const double damp = 1.0 - tau;
  Vector out(lambda.size(), 0.0);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!mask[i]) continue;
    const double v = damp * lambda[i] + beta * g_next[i];
    out[i] = v > 0.0 ? v : 0.0;
  }
  require_finite(out, "dual_step");
  return out;
}

ValidationReport validate_tau(const GdpaConfig& cfg, const ProblemConstants& constants) {
  ValidationReport rep;
  if (!constants.sigma || !constants.jacobian_bound) {
    rep.skipped = true;
    rep.message = "tau bound not checked: sigma or U_J unknown";
    return rep;
  }
  const double sigma = *constants.sigma;
  const double uj = *constants.jacobian_bound;
  rep.bound = std::isinf(sigma) ? 0.0 : 1.0 - sigma / std::sqrt(66.0 * uj * uj + sigma * sigma);
  rep.ok = cfg.tau > rep.bound;
  std::ostringstream os;
  os << "tau = " << cfg.tau << (rep.ok ? " exceeds" : " does not exceed")
     << " the theoretical lower bound " << rep.bound << " (sigma = " << sigma << ", U_J = " << uj << ")";
  rep.message = os.str();
  return rep;
}

ValidationReport validate_alpha(const GdpaConfig& cfg, const ProblemConstants& constants,
                                double lambda_norm, std::size_t r) {
  ValidationReport rep;
  if (!constants.grad_f_lipschitz || !constants.jacobian_lipschitz || !constants.jacobian_bound ||
      !constants.g_lipschitz) {
    rep.skipped = true;
    rep.message = "alpha condition not checked: constants unknown";
    return rep;
  }
  const StepSizes s = schedule(cfg, r);
  rep.bound = *constants.grad_f_lipschitz + (1.0 - cfg.tau) * lambda_norm * *constants.jacobian_lipschitz +
              s.beta * *constants.jacobian_bound * *constants.g_lipschitz;
  rep.ok = 1.0 / s.alpha >= rep.bound;
  std::ostringstream os;
  os << "r = " << r << ": 1/alpha_r = " << 1.0 / s.alpha << (rep.ok ? " >= " : " < ")
     << "descent bound " << rep.bound << " (||lambda|| = " << lambda_norm << ")";
  rep.message = os.str();
  return rep;
}

SolveResult solve(const ConstrainedProblem& p, const GdpaConfig& cfg, ConstSpan x0,
                  ConstSpan lambda0, const StepObserver& observer) {
  cfg.validate();
  p.validate();
  require_same_size(x0.size(), p.dim, "solve: x0");
  const std::size_t m = p.num_constraints;

  Vector x = p.projection.project(x0);
  Vector lambda(m, 0.0);
  if (!lambda0.empty()) {
    require_same_size(lambda0.size(), m, "solve: lambda0");
    for (double v : lambda0) {
      if (!(v >= 0.0)) throw std::invalid_argument("solve: lambda0 must be nonnegative");
    }
    lambda.assign(lambda0.begin(), lambda0.end());
  }

  SolveResult out;
  Vector x_acc(p.dim, 0.0);
  Vector lambda_acc(m, 0.0);
  double weight_sum = 0.0;

  try {
    for (std::size_t r = 1; r <= cfg.max_iters; ++r) {
      const StepSizes steps = schedule(cfg, r);
      const bool record = cfg.should_record(r);

      PointEvaluation at;
      at.grad_f = p.grad_f(x);
      at.g = p.g(x);
      at.jacobian = p.jacobian(x);
      if (record) at.f = p.f(x);

      const ActiveMask mask = active_set(at.g, lambda, steps.beta, cfg.tau);

      double stationarity_sq = -1.0;
      if (record) {
        IterationRecord rec =
            make_record(r, p.projection, at, x, lambda, steps.alpha, steps.beta, steps.gamma, cfg.tau);
        stationarity_sq = rec.stationarity_sq;
        out.trace.push_back(rec);
      }

      axpy_inplace(1.0 / steps.beta, x, x_acc);
      if (m > 0) axpy_inplace(1.0 / steps.beta, lambda, lambda_acc);
      weight_sum += 1.0 / steps.beta;
      if (cfg.keep_iterates) {
        out.x_history.push_back(x);
        out.lambda_history.push_back(lambda);
        out.beta_history.push_back(steps.beta);
      }

      Vector x_next = primal_step(p.projection, at, x, lambda, steps.alpha, steps.beta, cfg.tau);
      const Vector g_next = p.g(x_next);
      Vector lambda_next = dual_step(g_next, lambda, mask, steps.beta, cfg.tau);

#ifndef NDEBUG
      for (std::size_t i = 0; i < m; ++i) {
        if (!mask[i]) {
          assert(lambda_next[i] == 0.0);
        } else if (g_next[i] <= 0.0) {
          assert(lambda_next[i] <= (1.0 - cfg.tau) * lambda[i] + 1e-15);
        }
      }
#endif
      if (observer) observer(StepEvent{r, steps, x, lambda, mask, x_next, g_next, lambda_next});

      out.iterations = r;
      out.final_alpha = steps.alpha;
      out.final_beta = steps.beta;

      const double viol_sq = norm2_sq(positive_part(g_next));
      bool done = false;
      if (viol_sq <= cfg.eps_feas) {
        if (!out.T_eps) out.T_eps = r;
        if (stationarity_sq < 0.0) {
          stationarity_sq =
              stationarity_measure(p.projection, at, x, lambda, steps.alpha, steps.beta).norm_sq;
        }
        done = std::sqrt(stationarity_sq) <= cfg.eps_stat;
      }

      x = std::move(x_next);
      lambda = std::move(lambda_next);
      if (done) {
        out.termination = Termination::FeasibilityStop;
        break;
      }
    }
    if (out.termination != Termination::FeasibilityStop) out.termination = Termination::BudgetExhausted;
  } catch (const NumericalFailure& e) {
    out.termination = Termination::NumericalFailure;
    out.message = "iteration " + std::to_string(out.iterations + 1) + ": " + e.what();
  }

  out.x_final = x;
  out.lambda_final = lambda;
  if (weight_sum > 0.0) {
    for (double& v : x_acc) v /= weight_sum;
    for (double& v : lambda_acc) v /= weight_sum;
    out.x_avg = std::move(x_acc);
    out.lambda_avg = std::move(lambda_acc);
  } else {
    out.x_avg = x;
    out.lambda_avg = lambda;
  }
  return out;
}

}  // namespace gdpa
