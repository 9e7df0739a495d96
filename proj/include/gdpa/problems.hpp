#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gdpa/problem.hpp"
#include "gdpa/vec.hpp"

namespace gdpa::problems {

// ---------------------------------------------------------------------------
// Analytic instances with closed-form KKT pairs.

enum class AnalyticId {
  HalfspaceQuadratic,  ///< min ||x||^2 s.t. 1 - sum x <= 0
  CircleExterior,      ///< min ||x - c||^2 s.t. 1 - ||x||^2 <= 0, c = (0.5, 0)
  Scaled1d,            ///< min x^2 s.t. 1 - x <= 0
};

std::string_view analytic_name(AnalyticId id);
/// Throws std::invalid_argument for an unknown name.
AnalyticId analytic_from_name(std::string_view name);

struct AnalyticInstance {
  AnalyticId id;
  ConstrainedProblem problem;
  Vector x_star;
  Vector lambda_star;
  Vector x0;  ///< default starting point
};

/// Builds the instance and verifies its stored KKT pair (residuals <= 1e-10);
/// throws std::logic_error if the pair does not check out. `dim` only applies
/// to the halfspace instance (default 2).
AnalyticInstance build_analytic(AnalyticId id, std::size_t dim = 2);

// ---------------------------------------------------------------------------
// Labelled datasets for the classification problems.

struct Sample {
  Vector features;
  std::size_t label = 0;
};

struct MnpcDataset {
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<Sample> samples;
  std::string source;  ///< "synthetic-gaussian(...)" or "csv(path)"

  /// Throws std::invalid_argument on ragged features or labels out of range.
  void validate() const;
  std::vector<std::size_t> class_counts() const;
};

/// Class means lie on a sphere of radius 2 (random directions); each sample is
/// its class mean plus i.i.d. N(0, noise_std^2) noise. Deterministic in seed.
MnpcDataset generate_synthetic_mnpc(std::uint64_t seed, std::size_t num_classes, std::size_t d_in,
                                    std::size_t per_class, double noise_std);

/// Reads "class_id,feat1,...,featD" rows after one header line. Errors name
/// the offending line; all errors are std::invalid_argument.
MnpcDataset load_csv_dataset(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Multi-class Neyman-Pearson classification.
//
// Variable: K = m + 1 stacked linear scorers x_(0..m), each of length d_in.
// Class 0 is the prioritized class. With s(z) = 1 / (1 + exp(-z)):
//   f(x)   = (reg/2) sum_i ||x_(i)||^2 + mean_{xi in class 0} sum_{i != 0} s((x_(i) - x_(0))^T xi)
//   g_j(x) = mean_{xi in class j} sum_{i != j} s((x_(i) - x_(j))^T xi) - r_j,  j = 1..m

ConstrainedProblem build_mnpc(const MnpcDataset& data, double reg_lambda, const Vector& thresholds);

// ---------------------------------------------------------------------------
// Two-layer sigmoid network trained under per-class loss budgets.
//
// Weights: W1 (hidden x d_in) then W2 (K x hidden), row-major, no biases.
// Loss on a class split: mean over its samples of (1/K) ||s(W2 s(W1 xi)) - e_label||^2.
//   f = loss on class 0,  g_i = loss on class i - budget_i,  i = 1..m
// An infinite budget makes g_i the constant -1 with a zero gradient.

ConstrainedProblem build_nn_budget(const MnpcDataset& data, std::size_t hidden, const Vector& budgets);

// ---------------------------------------------------------------------------
// Tabular constrained MDP with a softmax policy.

struct TabularCmdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  Vector transitions;  ///< P[s][a][s'], flattened
  Vector reward;       ///< R[s][a]
  std::vector<Vector> constraint_rewards;  ///< G_i[s][a]
  double gamma = 0.9;
  Vector thresholds;  ///< b_i

  std::size_t num_constraints() const { return constraint_rewards.size(); }
  double transition(std::size_t s, std::size_t a, std::size_t s2) const {
    return transitions[(s * num_actions + a) * num_states + s2];
  }
  /// Throws std::invalid_argument unless rows are distributions and 0 <= gamma < 1.
  void validate() const;
};

/// Random instance: transition rows are normalized uniform draws, rewards are
/// uniform on [0, 1]. Thresholds start at zero.
TabularCmdp generate_random_cmdp(std::uint64_t seed, std::size_t num_states, std::size_t num_actions,
                                 std::size_t num_constraints, double gamma);

/// pi[s * A + a] = softmax over a of theta[s * A + a].
Vector softmax_policy(ConstSpan theta, std::size_t num_states, std::size_t num_actions);

struct PolicyEvaluation {
  Vector policy;
  Vector occupancy;  ///< normalized discounted state occupancy from the uniform start
  Vector value;      ///< V under `rewards`, per state
  Vector q;          ///< Q[s][a]
  double normalized_return = 0.0;  ///< (1 - gamma) * mean_s V(s)
  Vector gradient;  ///< d normalized_return / d theta
};

/// Exact evaluation of the softmax policy under one reward table.
PolicyEvaluation evaluate_policy(const TabularCmdp& model, ConstSpan theta, ConstSpan rewards);

/// Bellman residual ||V - (r_pi + gamma P_pi V)||_inf of an evaluation.
double bellman_residual(const TabularCmdp& model, const PolicyEvaluation& eval, ConstSpan rewards);

/// Minimization form of the CMDP:
///   f(theta)   = -(1 - gamma) E_{s0 ~ uniform} V_R(s0)
///   g_i(theta) = b_i - (1 - gamma) E_{s0 ~ uniform} V_{G_i}(s0)
/// A non-finite theta raises NumericalFailure.
ConstrainedProblem build_cmdp(const TabularCmdp& model);

}  // namespace gdpa::problems
