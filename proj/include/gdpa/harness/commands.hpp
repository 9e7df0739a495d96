#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gdpa/harness/run_config.hpp"
#include "gdpa/metrics.hpp"

namespace gdpa::harness {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kBadConfig = 2;
inline constexpr int kNumericalFailure = 3;
inline constexpr int kInsufficientData = 4;
}  // namespace exit_code

/// Sets the spdlog level from GDPA_LOG_LEVEL (error, warn, info, debug; default info).
void configure_logging();

/// Runs `body` and maps escaping exceptions to exit codes: ConfigError and
/// std::invalid_argument give 2, NumericalFailure 3, InsufficientData 4,
/// anything else 1. The message goes to `err`.
int guarded(std::ostream& err, const std::function<int()>& body);

/// Writes trace.csv, summary.json and warnings.log (plus iterates.csv when
/// every iterate is recorded) for the first configured solver.
int run_solve(const RunConfig& cfg, std::ostream& out);

/// Runs every configured solver under the shared budget into
/// <out>/<index>-<solver>/ and writes <out>/compare.csv.
int run_benchmark(const RunConfig& cfg, std::ostream& out);

struct RateCeiling {
  TraceColumn column;
  double max_slope;
};

struct RateReportOptions {
  std::filesystem::path trace_path;
  std::pair<std::size_t, std::size_t> window{1000, 100000};
  std::vector<RateCeiling> ceilings{{TraceColumn::StationaritySq, -0.5},
                                    {TraceColumn::FeasibilitySq, -0.5},
                                    {TraceColumn::Slackness, -0.25}};
  /// rate.json goes here; defaults to the trace's directory.
  std::filesystem::path output_dir;
};

/// Fits each configured column and writes rate.json. Exit 0 if every slope is
/// at most its ceiling, 1 otherwise, 4 when a column has too few points.
int run_rate_report(const RateReportOptions& opts, std::ostream& out);

struct CheckOptions {
  std::size_t num_points = 20;
  double fd_step = 1e-6;
  double tolerance = 1e-5;
};

/// Gradient/Jacobian check plus a sampled sigma. Exit 0 iff the check passes.
int run_check(const RunConfig& cfg, std::ostream& out, const CheckOptions& opts = {});
/// Same, on an already built problem.
int run_check(const ConstrainedProblem& p, std::uint64_t seed, std::ostream& out,
              const CheckOptions& opts = {});

}  // namespace gdpa::harness
