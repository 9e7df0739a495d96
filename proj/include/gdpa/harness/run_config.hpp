#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdpa/baselines.hpp"
#include "gdpa/gdpa.hpp"
#include "gdpa/problems.hpp"

namespace gdpa::harness {

/// Raised for anything wrong with a run configuration (the CLI maps it to exit 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DatasetParams {
  std::string source = "synthetic";  ///< "synthetic" or "csv"
  std::string csv_path;
  std::size_t num_classes = 3;
  std::size_t feature_dim = 20;
  std::size_t per_class = 50;
  double noise_std = 1.0;
};

struct AnalyticParams {
  problems::AnalyticId id = problems::AnalyticId::Scaled1d;
  std::size_t dim = 2;
};

struct MnpcParams {
  DatasetParams data;
  double reg_lambda = 1.0;
  Vector thresholds;  ///< empty: 0.1 for every constraint
};

struct NnParams {
  DatasetParams data;
  std::size_t hidden = 8;
  Vector budgets;  ///< empty: 0.2 for every constraint; null in JSON means +inf
};

struct CmdpParams {
  std::size_t num_states = 10;
  std::size_t num_actions = 4;
  std::size_t num_constraints = 2;
  double gamma = 0.9;
  Vector thresholds;  ///< empty: 0.5 for every constraint
};

using ProblemParams = std::variant<AnalyticParams, MnpcParams, NnParams, CmdpParams>;
using SolverParams = std::variant<GdpaConfig, PenaltyConfig, AlmConfig>;

std::string solver_name(const SolverParams& s);

struct RunConfig {
  ProblemParams problem = AnalyticParams{};
  std::vector<SolverParams> solvers{GdpaConfig{}};
  /// Gradient-evaluation budget shared by every solver.
  std::size_t budget = 100000;
  std::filesystem::path output_dir = "out";
  std::size_t record_every = 10;
  std::size_t record_dense_until = 1000;
  std::uint64_t seed = 0;
  std::optional<Vector> x0;

  /// Throws ConfigError.
  void validate() const;
};

/// Missing keys take the defaults above. Unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
/// Reads and parses a JSON file; unreadable files and malformed JSON raise ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

struct BuiltProblem {
  ConstrainedProblem problem;
  Vector x0;
  std::optional<problems::AnalyticInstance> analytic;
  std::optional<problems::TabularCmdp> cmdp;
};

/// Problem instance and starting point implied by the config and its seed.
BuiltProblem build_problem(const RunConfig& cfg);

/// Solver config with the run-wide budget and recording schedule applied.
SolverParams effective_solver(const SolverParams& s, const RunConfig& cfg);

SolveResult run_solver(const BuiltProblem& built, const SolverParams& solver, ConstSpan x0);

}  // namespace gdpa::harness
