#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gdpa/projection.hpp"
#include "gdpa/vec.hpp"

namespace gdpa {

/// Smoothness and boundedness constants of a problem. Any field may be left
/// empty by the problem author; effective_constants() fills the gaps.
struct ProblemConstants {
  std::optional<double> grad_f_lipschitz;    ///< L_f: Lipschitz constant of grad f
  std::optional<double> g_lipschitz;         ///< L_g: Lipschitz constant of g
  std::optional<double> jacobian_lipschitz;  ///< L_J: Lipschitz constant of J
  std::optional<double> grad_f_bound;        ///< M: bound on ||grad f||
  std::optional<double> violation_sq_bound;  ///< G: bound on ||g_+||^2
  std::optional<double> jacobian_bound;      ///< U_J: bound on ||J|| (spectral)
  std::optional<double> sigma;               ///< regularity constant; +inf if never violated

  /// Throws std::invalid_argument on negative values or a nonpositive sigma.
  void validate() const;
};

/// min f(x) s.t. g(x) <= 0, x in X.
///
/// Callbacks must be deterministic and safe to call concurrently. The checked
/// evaluators below verify output sizes and finiteness on every call.
struct ConstrainedProblem {
  using ScalarFn = std::function<double(ConstSpan)>;
  using VectorFn = std::function<Vector(ConstSpan)>;
  using MatrixFn = std::function<Matrix(ConstSpan)>;

  std::string name;
  std::size_t dim = 0;
  std::size_t num_constraints = 0;
  ScalarFn eval_f;
  VectorFn eval_grad_f;
  VectorFn eval_g;
  MatrixFn eval_jacobian;
  ProjectionSpec projection;
  ProblemConstants constants;
  /// Random sample points for checks and estimates are drawn uniformly from
  /// [-sample_halfwidth, sample_halfwidth]^dim and then projected into X.
  double sample_halfwidth = 1.0;

  /// Throws std::invalid_argument if the record is inconsistent.
  void validate() const;

  double f(ConstSpan x) const;
  Vector grad_f(ConstSpan x) const;
  Vector g(ConstSpan x) const;
  Matrix jacobian(ConstSpan x) const;
};

/// Seeded sample points, projected into X.
std::vector<Vector> sample_points(const ConstrainedProblem& p, std::size_t count,
                                  std::uint64_t seed);

struct GradientCheckReport {
  double max_grad_error = 0.0;
  std::size_t worst_grad_point = 0;
  /// Empty when the problem has no constraints.
  std::optional<double> max_jacobian_error;
  std::size_t worst_jacobian_point = 0;
  std::size_t num_points = 0;

  bool passes(double tol) const {
    return max_grad_error <= tol && (!max_jacobian_error || *max_jacobian_error <= tol);
  }
};

/// Compares analytic derivatives with central differences of step h.
///
/// Errors are ||fd - analytic|| / max(1, ||analytic||), Euclidean for the
/// gradient and Frobenius for the Jacobian. Points are projected into X first.
/// A non-finite callback value throws NumericalFailure naming the point.
GradientCheckReport check_gradients(const ConstrainedProblem& p, const std::vector<Vector>& points,
                                    double h);

/// Sampled regularity constant:
///   min over samples with g_+(x) != 0 of dist(J^T g_+, -N_X(x)) / ||g_+||.
///
/// Heuristic: it only inspects the given samples, so it over-estimates the true
/// infimum. Returns +infinity when no sample violates a constraint. Supported
/// for X = R^d and boxes; other sets throw UnsupportedOperation.
double estimate_sigma(const ConstrainedProblem& p, const std::vector<Vector>& samples);

inline constexpr double kConstantSafetyFactor = 1.5;

/// Fills every empty field of p.constants by sampling `sample_budget` seeded
/// points in X. Lipschitz constants and bounds are multiplied by
/// kConstantSafetyFactor; the sampled sigma (a lower bound) is divided by it.
/// sigma stays empty when X is not R^d or a box.
ProblemConstants effective_constants(const ConstrainedProblem& p, std::size_t sample_budget,
                                     std::uint64_t seed);

/// Largest singular value.
double spectral_norm(const Matrix& m);

}  // namespace gdpa
