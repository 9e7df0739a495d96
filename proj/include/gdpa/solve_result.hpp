#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gdpa/metrics.hpp"
#include "gdpa/vec.hpp"

namespace gdpa {

enum class Termination { FeasibilityStop, BudgetExhausted, NumericalFailure };

std::string_view termination_name(Termination t);

/// Output of every solver in this library. Trace rows share one schema, and
/// `r` counts first-order oracle calls (one grad f plus one Jacobian).
struct SolveResult {
  Vector x_final;
  Vector lambda_final;
  Vector x_avg;
  Vector lambda_avg;
  Termination termination = Termination::BudgetExhausted;
  std::optional<std::size_t> T_eps;
  std::size_t iterations = 0;
  std::vector<IterationRecord> trace;
  /// Step sizes of the last iteration executed, used to report residuals.
  double final_alpha = 0.0;
  double final_beta = 0.0;
  std::string message;

  /// Filled only when the solver was asked to keep every iterate: (x_r, lambda_r, beta_r).
  std::vector<Vector> x_history;
  std::vector<Vector> lambda_history;
  std::vector<double> beta_history;
};

}  // namespace gdpa
