#include "gdpa/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gdpa/errors.hpp"
#include "gdpa/harness/trace_io.hpp"

namespace gdpa::harness {

using nlohmann::json;

void configure_logging() {
  auto logger = spdlog::get("gdpa");
  if (!logger) logger = spdlog::stderr_color_mt("gdpa");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("GDPA_LOG_LEVEL");
  const std::string level = env ? env : "info";
  static const std::map<std::string, spdlog::level::level_enum> levels{{"error", spdlog::level::err},
                                                                      {"warn", spdlog::level::warn},
                                                                      {"info", spdlog::level::info},
                                                                      {"debug", spdlog::level::debug}};
  const auto it = levels.find(level);
  spdlog::set_level(it == levels.end() ? spdlog::level::info : it->second);
  if (it == levels.end()) spdlog::warn("GDPA_LOG_LEVEL={} is not one of error, warn, info, debug; using info", level);
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kBadConfig;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_code::kNumericalFailure;
  } catch (const InsufficientData& e) {
    err << "insufficient data: " << e.what() << '\n';
    return exit_code::kInsufficientData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailed;
  }
}

namespace {

json vec_json(const Vector& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

json kkt_json(const ConstrainedProblem& p, const Vector& x, const Vector& lambda, double alpha) {
  try {
    const KktResidual k = kkt_residual(p, x, lambda, alpha);
    return json{{"stationarity", k.stationarity}, {"feasibility", k.feasibility}, {"slackness", k.slackness}};
  } catch (const NumericalFailure&) {
    return nullptr;
  }
}

json f_json(const ConstrainedProblem& p, const Vector& x) {
  try {
    return p.f(x);
  } catch (const NumericalFailure&) {
    return nullptr;
  }
}

json reference_json(const BuiltProblem& built, const SolveResult& res) {
  json ref = json::object();
  if (built.analytic) {
    const auto& a = *built.analytic;
    ref["x_star"] = vec_json(a.x_star);
    ref["lambda_star"] = vec_json(a.lambda_star);
    ref["x_final_error"] = norm2(subtract(res.x_final, a.x_star));
    ref["lambda_final_error"] = norm2(subtract(res.lambda_final, a.lambda_star));
  }
  if (built.cmdp && all_finite(res.x_final)) {
    const auto& model = *built.cmdp;
    json returns = json::array();
    returns.push_back(problems::evaluate_policy(model, res.x_final, model.reward).normalized_return);
    json constraint_returns = json::array();
    for (const Vector& g : model.constraint_rewards) {
      constraint_returns.push_back(problems::evaluate_policy(model, res.x_final, g).normalized_return);
    }
    ref["reward_return"] = returns.front();
    ref["constraint_returns"] = constraint_returns;
    ref["thresholds"] = vec_json(model.thresholds);
  }
  return ref;
}

struct RunOutcome {
  SolveResult result;
  double wall_ms = 0.0;
  std::vector<std::string> warnings;
};

std::vector<std::string> pre_run_checks(const BuiltProblem& built, const SolverParams& solver,
                                        const RunConfig& cfg, ProblemConstants& constants) {
  std::vector<std::string> notes;
  const auto* g = std::get_if<GdpaConfig>(&solver);
  if (!g) return notes;
  constants = effective_constants(built.problem, 32, cfg.seed);
  for (const ValidationReport& rep :
       {validate_tau(*g, constants), validate_alpha(*g, constants, norm2(Vector(built.problem.num_constraints)), 1)}) {
    if (rep.skipped) {
      notes.push_back("note: " + rep.message);
    } else if (!rep.ok) {
      notes.push_back("warning: " + rep.message);
    }
  }
  return notes;
}

RunOutcome execute(const BuiltProblem& built, const SolverParams& solver, const RunConfig& cfg) {
  RunOutcome out;
  ProblemConstants constants;
  out.warnings = pre_run_checks(built, solver, cfg, constants);
  for (const std::string& w : out.warnings) spdlog::warn("{}", w);

  spdlog::info("running {} on {} (d = {}, m = {}, budget = {})", solver_name(solver), built.problem.name,
               built.problem.dim, built.problem.num_constraints, cfg.budget);
  const auto start = std::chrono::steady_clock::now();
  out.result = run_solver(built, solver, built.x0);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (const auto* g = std::get_if<GdpaConfig>(&solver); g && out.result.iterations > 0) {
    const ValidationReport rep =
        validate_alpha(*g, constants, norm2(out.result.lambda_final), out.result.iterations);
    if (!rep.skipped && !rep.ok) {
      out.warnings.push_back("warning: " + rep.message);
      spdlog::warn("{}", rep.message);
    }
  }
  if (out.result.termination == Termination::NumericalFailure) {
    out.warnings.push_back("error: " + out.result.message);
    spdlog::error("{}", out.result.message);
  }
  spdlog::info("{} finished: {} after {} iterations", solver_name(solver),
               termination_name(out.result.termination), out.result.iterations);
  return out;
}

void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const BuiltProblem& built,
                   const SolverParams& solver, const RunOutcome& run) {
  std::filesystem::create_directories(dir);
  const SolveResult& res = run.result;
  write_trace(dir / "trace.csv", res.trace);
  if (!res.x_history.empty()) write_iterates(dir / "iterates.csv", res.x_history, res.lambda_history);

  const double alpha = res.final_alpha > 0.0 ? res.final_alpha : 1.0;
  json summary{{"solver", solver_name(solver)},
               {"problem", built.problem.name},
               {"termination", std::string{termination_name(res.termination)}},
               {"message", res.message},
               {"iterations", res.iterations},
               {"T_eps", res.T_eps ? json(*res.T_eps) : json(nullptr)},
               {"wall_ms", run.wall_ms},
               {"final_alpha", res.final_alpha},
               {"final_beta", res.final_beta},
               {"kkt_alpha", alpha},
               {"x_final", vec_json(res.x_final)},
               {"lambda_final", vec_json(res.lambda_final)},
               {"x_avg", vec_json(res.x_avg)},
               {"lambda_avg", vec_json(res.lambda_avg)},
               {"f_final", f_json(built.problem, res.x_final)},
               {"f_avg", f_json(built.problem, res.x_avg)},
               {"kkt_final", kkt_json(built.problem, res.x_final, res.lambda_final, alpha)},
               {"kkt_avg", kkt_json(built.problem, res.x_avg, res.lambda_avg, alpha)},
               {"reference", reference_json(built, res)},
               {"config", to_json(cfg)}};
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");

  std::string log;
  for (const std::string& w : run.warnings) log += w + "\n";
  write_text_file(dir / "warnings.log", log);
}

int exit_for(const SolveResult& res) {
  return res.termination == Termination::NumericalFailure ? exit_code::kNumericalFailure : exit_code::kOk;
}

}  // namespace

int run_solve(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const BuiltProblem built = build_problem(cfg);
  const SolverParams solver = effective_solver(cfg.solvers.front(), cfg);
  const RunOutcome run = execute(built, solver, cfg);
  write_outputs(cfg.output_dir, cfg, built, solver, run);

  const SolveResult& res = run.result;
  out << solver_name(solver) << " on " << built.problem.name << ": " << termination_name(res.termination)
      << " after " << res.iterations << " iterations";
  if (res.T_eps) out << " (T_eps = " << *res.T_eps << ")";
  out << "\n";
  if (!res.message.empty()) out << res.message << "\n";
  out << "outputs written to " << cfg.output_dir.string() << "\n";
  return exit_for(res);
}

int run_benchmark(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.solvers.size() < 2) throw ConfigError("benchmark: configure at least two solvers");
  const BuiltProblem built = build_problem(cfg);

  std::map<std::string, int> name_count;
  for (const SolverParams& s : cfg.solvers) ++name_count[solver_name(s)];

  struct Job {
    std::string label;
    RunOutcome run;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    const SolverParams solver = effective_solver(cfg.solvers[i], cfg);
    std::string label = solver_name(solver);
    if (name_count[label] > 1) label += "-" + std::to_string(i);
    RunOutcome run = execute(built, solver, cfg);
    write_outputs(cfg.output_dir / label, cfg, built, solver, run);
    jobs.push_back({label, std::move(run)});
  }

  // Shared grid: the recording schedule every solver follows; each solver is
  // sampled at its last record at or before the grid point.
  std::vector<std::size_t> grid;
  for (std::size_t r = 1; r <= cfg.budget; ++r) {
    if (r <= cfg.record_dense_until || r % cfg.record_every == 0) grid.push_back(r);
  }
  std::string csv = "solver,grad_evals,wall_ms,stationarity_sq,feasibility,slackness\n";
  int code = exit_code::kOk;
  for (const Job& job : jobs) {
    const SolveResult& res = job.run.result;
    if (res.termination == Termination::NumericalFailure) code = exit_code::kNumericalFailure;
    std::size_t k = 0;
    for (std::size_t r : grid) {
      while (k + 1 < res.trace.size() && res.trace[k + 1].r <= r) ++k;
      const bool have = !res.trace.empty() && res.trace[k].r <= r;
      const double used = static_cast<double>(std::min(r, std::max<std::size_t>(res.iterations, 1)));
      const double wall = job.run.wall_ms * used / static_cast<double>(std::max<std::size_t>(res.iterations, 1));
      const double nan = std::nan("");
      csv += job.label + "," + std::to_string(r) + "," + format_double(wall) + "," +
             format_double(have ? res.trace[k].stationarity_sq : nan) + "," +
             format_double(have ? res.trace[k].feasibility : nan) + "," +
             format_double(have ? res.trace[k].slackness : nan) + "\n";
    }
    out << job.label << ": " << termination_name(res.termination) << " after " << res.iterations
        << " gradient evaluations, final feasibility "
        << (res.trace.empty() ? std::nan("") : res.trace.back().feasibility) << "\n";
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_text_file(cfg.output_dir / "compare.csv", csv);
  out << "compare.csv written to " << cfg.output_dir.string() << "\n";
  return code;
}

int run_rate_report(const RateReportOptions& opts, std::ostream& out) {
  if (opts.window.first == 0 || opts.window.first >= opts.window.second) {
    throw ConfigError("rate-report: window must satisfy 1 <= lo < hi");
  }
  if (opts.ceilings.empty()) throw ConfigError("rate-report: no columns to fit");
  const auto trace = read_trace(opts.trace_path);

  bool all_pass = true;
  bool insufficient = false;
  json fits = json::array();
  for (const RateCeiling& c : opts.ceilings) {
    const std::string name{column_name(c.column)};
    json entry{{"column", name}, {"ceiling", c.max_slope}};
    try {
      const RateFit fit = fit_rate(trace, c.column, opts.window);
      const bool pass = fit.slope <= c.max_slope;
      all_pass = all_pass && pass;
      entry["slope"] = fit.slope;
      entry["intercept"] = fit.intercept;
      entry["r_squared"] = fit.r_squared;
      entry["points"] = fit.points;
      entry["pass"] = pass;
      out << name << ": slope " << fit.slope << " (r^2 " << fit.r_squared << ", " << fit.points
          << " points) vs ceiling " << c.max_slope << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    } catch (const InsufficientData& e) {
      insufficient = true;
      all_pass = false;
      entry["error"] = e.what();
      entry["pass"] = false;
      out << name << ": insufficient data (" << e.what() << ")\n";
    }
    fits.push_back(entry);
  }

  const std::filesystem::path dir =
      opts.output_dir.empty() ? opts.trace_path.parent_path() : opts.output_dir;
  if (!dir.empty()) std::filesystem::create_directories(dir);
  json report{{"trace", opts.trace_path.string()},
              {"window", json::array({opts.window.first, opts.window.second})},
              {"fits", fits},
              {"pass", all_pass}};
  write_text_file((dir.empty() ? std::filesystem::path{"."} : dir) / "rate.json", report.dump(2) + "\n");
  out << (all_pass ? "PASS" : "FAIL") << "\n";
  if (insufficient) return exit_code::kInsufficientData;
  return all_pass ? exit_code::kOk : exit_code::kFailed;
}

int run_check(const ConstrainedProblem& p, std::uint64_t seed, std::ostream& out, const CheckOptions& opts) {
  p.validate();
  const auto points = sample_points(p, opts.num_points, seed);
  const GradientCheckReport rep = check_gradients(p, points, opts.fd_step);

  out << "problem: " << p.name << " (d = " << p.dim << ", m = " << p.num_constraints << ", "
      << rep.num_points << " points)\n";
  out << "gradient: max relative error " << rep.max_grad_error << " at point " << rep.worst_grad_point << "\n";
  if (rep.max_jacobian_error) {
    out << "jacobian: max relative error " << *rep.max_jacobian_error << " at point "
        << rep.worst_jacobian_point << "\n";
  } else {
    out << "jacobian: skipped (no constraints)\n";
  }
  try {
    const double sigma = estimate_sigma(p, sample_points(p, 64, seed + 1));
    if (std::isinf(sigma)) {
      out << "sigma: no violated sample (+inf)\n";
    } else {
      out << "sigma: " << sigma << " (sampled)\n";
    }
  } catch (const UnsupportedOperation& e) {
    out << "sigma: unsupported (" << e.what() << ")\n";
  }
  const bool pass = rep.passes(opts.tolerance);
  out << "result: " << (pass ? "PASS" : "FAIL") << " (tolerance " << opts.tolerance << ")\n";
  return pass ? exit_code::kOk : exit_code::kFailed;
}

int run_check(const RunConfig& cfg, std::ostream& out, const CheckOptions& opts) {
  const BuiltProblem built = build_problem(cfg);
  return run_check(built.problem, cfg.seed, out, opts);
}

}  // namespace gdpa::harness
