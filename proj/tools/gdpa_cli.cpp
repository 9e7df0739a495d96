#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdpa/harness/commands.hpp"
#include "gdpa/harness/run_config.hpp"

namespace {

using namespace gdpa::harness;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run configuration (JSON)")->required();
  cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "seed (overrides seed)");
}

RunConfig load_with_overrides(const Overrides& o) {
  RunConfig cfg = load_run_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

gdpa::TraceColumn column_from_name(const std::string& name) {
  for (auto c : {gdpa::TraceColumn::StationaritySq, gdpa::TraceColumn::Feasibility,
                 gdpa::TraceColumn::FeasibilitySq, gdpa::TraceColumn::Slackness}) {
    if (gdpa::column_name(c) == name) return c;
  }
  throw ConfigError("unknown trace column \"" + name + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"GDPA solver, baselines and experiment harness"};
  app.require_subcommand(1);

  Overrides solve_opts;
  auto* solve = app.add_subcommand("solve", "run the first configured solver");
  add_run_options(solve, solve_opts);

  Overrides bench_opts;
  auto* bench = app.add_subcommand("benchmark", "run every configured solver under a shared budget");
  add_run_options(bench, bench_opts);

  Overrides check_opts;
  CheckOptions check_extra;
  auto* check = app.add_subcommand("check", "finite-difference check of the configured problem");
  add_run_options(check, check_opts);
  check->add_option("--points", check_extra.num_points, "number of sample points");
  check->add_option("--tol", check_extra.tolerance, "relative error tolerance");

  std::string trace_path;
  std::vector<std::size_t> window;
  std::vector<std::string> ceilings;
  std::string rate_out;
  auto* rate = app.add_subcommand("rate-report", "fit log-log convergence slopes of a trace");
  rate->add_option("--trace", trace_path, "trace.csv to fit")->required();
  rate->add_option("--window", window, "fit window LO HI (default 1000 100000)")->expected(2);
  rate->add_option("--ceiling", ceilings,
                   "COLUMN=SLOPE, repeatable; replaces the defaults "
                   "stationarity_sq=-0.5 feasibility_sq=-0.5 slackness=-0.25");
  rate->add_option("--out", rate_out, "directory for rate.json (default: the trace's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::kBadConfig;
  }

  if (*solve) return guarded(std::cerr, [&] { return run_solve(load_with_overrides(solve_opts), std::cout); });
  if (*bench) {
    return guarded(std::cerr, [&] { return run_benchmark(load_with_overrides(bench_opts), std::cout); });
  }
  if (*check) {
    return guarded(std::cerr,
                   [&] { return run_check(load_with_overrides(check_opts), std::cout, check_extra); });
  }
  return guarded(std::cerr, [&] {
    RateReportOptions opts;
    opts.trace_path = trace_path;
    opts.output_dir = rate_out;
    if (!window.empty()) opts.window = {window[0], window[1]};
    if (!ceilings.empty()) {
      opts.ceilings.clear();
      for (const std::string& spec : ceilings) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw ConfigError("--ceiling expects COLUMN=SLOPE, got \"" + spec + "\"");
        double slope = 0.0;
        try {
          slope = std::stod(spec.substr(eq + 1));
        } catch (const std::exception&) {
          throw ConfigError("--ceiling: bad slope in \"" + spec + "\"");
        }
        opts.ceilings.push_back({column_from_name(spec.substr(0, eq)), slope});
      }
    }
    return run_rate_report(opts, std::cout);
  });
}
