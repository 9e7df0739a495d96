#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "gdpa/problem.hpp"
#include "gdpa/vec.hpp"

namespace gdpa {

/// One row of a solver trace, measured at (x_r, lambda_r).
struct IterationRecord {
  std::size_t r = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double f_value = 0.0;
  double F_beta_value = 0.0;
  double stationarity_sq = 0.0;  ///< ||G(x_r, lambda_r)||^2
  double feasibility = 0.0;      ///< ||g_+(x_r)||
  double slackness = 0.0;        ///< sum_i |lambda_i g_i(x_r)|
  double lambda_norm = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double slackness = 0.0;

  double max() const;
};

struct StationarityMeasure {
  Vector residual;  ///< primal block (length d) followed by dual block (length m)
  double norm_sq = 0.0;
};

// Evaluations at one point, so the solver can measure without re-evaluating.
struct PointEvaluation {
  double f = 0.0;
  Vector grad_f;
  Vector g;
  Matrix jacobian;

  static PointEvaluation at(const ConstrainedProblem& p, ConstSpan x);
};

/// f(x) + (beta/2)||[g(x) + (1-tau) lambda / beta]_+||^2 - ||(1-tau) lambda||^2 / (2 beta)
double perturbed_lagrangian(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda, double beta,
                            double tau);
double perturbed_lagrangian(double f, ConstSpan g, ConstSpan lambda, double beta, double tau);

/// Stacked proximal-gradient residuals of the (unperturbed) Lagrangian
/// L(x, lambda) = f(x) + <g(x), lambda>:
///   (1/alpha)[x - P_X(x - alpha (grad f + J^T lambda))]
///   (1/beta)[lambda - P_{>=0}(lambda + beta g(x))]
StationarityMeasure stationarity_measure(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda,
                                         double alpha, double beta);
StationarityMeasure stationarity_measure(const ProjectionSpec& set, const PointEvaluation& at,
                                         ConstSpan x, ConstSpan lambda, double alpha, double beta);

/// KKT residual triple. Stationarity is the norm of the primal block of the
/// stationarity measure; for X = R^d that is exactly ||grad f + J^T lambda||.
KktResidual kkt_residual(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda, double alpha);
KktResidual kkt_residual(const ProjectionSpec& set, const PointEvaluation& at, ConstSpan x,
                         ConstSpan lambda, double alpha);

/// sum_i |lambda_i g_i|
double slackness(ConstSpan lambda, ConstSpan g);

/// (sum 1/beta_r)^-1 sum x_r / beta_r. Throws std::invalid_argument on an
/// empty or mismatched input or a nonpositive beta.
Vector weighted_average(const std::vector<Vector>& iterates, const std::vector<double>& betas);

/// Builds a trace record from evaluations already made at (x_r, lambda_r).
IterationRecord make_record(std::size_t r, const ProjectionSpec& set, const PointEvaluation& at,
                            ConstSpan x, ConstSpan lambda, double alpha, double beta, double gamma,
                            double tau);

enum class TraceColumn { StationaritySq, Feasibility, FeasibilitySq, Slackness };

std::string_view column_name(TraceColumn c);
double column_value(const IterationRecord& rec, TraceColumn c);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

inline constexpr std::size_t kMinRatePoints = 10;

/// Least-squares fit of log(envelope) against log(r) over r in [r_lo, r_hi],
/// where the envelope is the running minimum of the column started at r_lo.
/// Nonpositive envelope values are skipped. Throws InsufficientData with
/// fewer than kMinRatePoints usable records.
RateFit fit_rate(const std::vector<IterationRecord>& trace, TraceColumn column,
                 std::pair<std::size_t, std::size_t> window);

}  // namespace gdpa
