// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run everything
//   acceptance --only N   run criterion N (repeatable)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gdpa/gdpa.hpp"
#include "gdpa/harness/run_config.hpp"
#include "gdpa/harness/trace_io.hpp"
#include "gdpa/metrics.hpp"
#include "gdpa/problems.hpp"
#include "test_support.hpp"

#include <spdlog/spdlog.h>

using namespace gdpa;
using problems::AnalyticId;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GdpaConfig pinned_config() {
  GdpaConfig c;
  c.tau = 0.1;
  c.beta0 = 0.1;
  c.alpha01 = 1.0;
  c.alpha02 = 1.0;
  c.alpha03 = 1.0;
  c.max_iters = 100000;
  return c;
}

// 1. KKT recovery on scaled-1d and halfspace-quadratic.
Outcome criterion_1() {
  Outcome out{true, ""};
  for (AnalyticId id : {AnalyticId::Scaled1d, AnalyticId::HalfspaceQuadratic}) {
    const auto inst = problems::build_analytic(id);
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult res = solve(inst.problem, pinned_config(), inst.x0);
    const double secs = seconds_since(t0);
    const double dx = norm2(subtract(res.x_final, inst.x_star));
    const double viol = norm2(positive_part(inst.problem.g(res.x_final)));
    const double dl = norm2(subtract(res.lambda_final, inst.lambda_star));
    const bool ok = dx <= 1e-2 && viol <= 1e-3 && dl <= 5e-2 && secs <= 5.0;
    out.pass = out.pass && ok;
    out.detail += fmt("%s: |x-x*|=%.3g (<=1e-2) |g+|=%.3g (<=1e-3) |lambda-lambda*|=%.3g (<=5e-2) %.2fs (<=5s) %s; ",
                      inst.problem.name.c_str(), dx, viol, dl, secs, ok ? "ok" : "miss");
  }
  return out;
}

// 2. Log-log slopes of the running-minimum envelope over r in [1e3, 1e5].
Outcome criterion_2() {
  Outcome out{true, ""};
  const auto t0 = std::chrono::steady_clock::now();
  const std::pair<TraceColumn, double> ceilings[] = {{TraceColumn::StationaritySq, -0.5},
                                                     {TraceColumn::FeasibilitySq, -0.5},
                                                     {TraceColumn::Slackness, -0.25}};
  for (AnalyticId id : {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior}) {
    const auto inst = problems::build_analytic(id);
    const SolveResult res = solve(inst.problem, pinned_config(), inst.x0);
    out.detail += inst.problem.name + ":";
    for (const auto& [column, ceiling] : ceilings) {
      try {
        const RateFit fit = fit_rate(res.trace, column, {1000, 100000});
        const bool ok = fit.slope <= ceiling;
        out.pass = out.pass && ok;
        out.detail += fmt(" %s %.3f (<=%.2f)", std::string(column_name(column)).c_str(), fit.slope, ceiling);
      } catch (const std::exception& e) {
        out.pass = false;
        out.detail += " " + std::string(column_name(column)) + " no fit (" + e.what() + ")";
      }
    }
    out.detail += "; ";
  }
  const double secs = seconds_since(t0);
  out.pass = out.pass && secs <= 60.0;
  out.detail += fmt("%.1fs (<=60s)", secs);
  return out;
}

// 3. Dual contraction on random quadratic programs.
Outcome criterion_3() {
  std::size_t checked_active = 0, checked_inactive = 0, violations = 0, failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng{seed * 7919 + 1};
    const std::size_t d = 2 + seed % 5;
    const std::size_t m = 1 + seed % 3;
    const ConstrainedProblem p = testing::quadratic_problem(seed, d, m);
    GdpaConfig c;
    c.tau = std::uniform_real_distribution<double>{0.05, 0.5}(rng);
    c.beta0 = std::uniform_real_distribution<double>{0.1, 2.0}(rng);
    c.alpha01 = 0.02;
    c.max_iters = 10000;
    c.record_every = 1000000;
    c.record_dense_until = 0;
    c.eps_stat = 1e-300;
    const Vector x0 = testing::random_vector(rng, d);
    const SolveResult res = solve(p, c, x0, {}, [&](const StepEvent& e) {
      for (std::size_t i = 0; i < m; ++i) {
        if (!e.mask[i]) {
          ++checked_inactive;
          if (e.lambda_next[i] != 0.0) ++violations;
        } else if (e.g_next[i] <= 0.0) {
          ++checked_active;
          if (!(e.lambda_next[i] <= (1.0 - c.tau) * e.lambda[i] + 1e-15)) ++violations;
        }
      }
    });
    if (res.termination == Termination::NumericalFailure || res.iterations != 10000) ++failures;
  }
  Outcome out;
  out.pass = violations == 0 && failures == 0 && checked_active > 0 && checked_inactive > 0;
  out.detail = fmt("100 problems x 1e4 iterations: %zu violations; %zu active/decrease cases and %zu inactive cases "
                   "checked; %zu runs cut short",
                   violations, checked_active, checked_inactive, failures);
  return out;
}

// 4. With m = 0 GDPA is projected gradient descent, bit for bit.
Outcome criterion_4() {
  std::size_t mismatches = 0, compared = 0, early_stops = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng{seed + 100};
    const std::size_t d = 2 + seed % 7;
    ConstrainedProblem p = testing::quadratic_problem(seed + 500, d, 0);
    Vector lo(d), hi(d);
    if (seed % 2 == 1) {
      lo = testing::random_vector(rng, d, -1.0, -0.1);
      hi = testing::random_vector(rng, d, 0.1, 1.0);
      p.projection = ProjectionSpec::box(lo, hi);
    }
    GdpaConfig c;
    c.alpha01 = std::uniform_real_distribution<double>{0.05, 0.5}(rng);
    c.alpha02 = std::uniform_real_distribution<double>{0.5, 2.0}(rng);
    c.alpha03 = std::uniform_real_distribution<double>{0.5, 2.0}(rng);
    c.max_iters = 2000;
    c.eps_stat = 1e-300;
    c.keep_iterates = true;
    const Vector x0 = testing::random_vector(rng, d, -2.0, 2.0);
    const SolveResult res = solve(p, c, x0);
    if (res.termination == Termination::FeasibilityStop) ++early_stops;
    if (res.termination == Termination::NumericalFailure || res.x_history.size() != res.iterations) {
      ++mismatches;
      continue;
    }

    auto proj = [&](Vector v) {
      if (seed % 2 == 1) {
        for (std::size_t i = 0; i < d; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
      }
      return v;
    };
    // Replays as many steps as GDPA took; it may stop early at an exact fixed point.
    Vector x = proj(x0);
    for (std::size_t r = 1; r <= res.iterations; ++r) {
      ++compared;
      if (std::memcmp(x.data(), res.x_history[r - 1].data(), d * sizeof(double)) != 0) {
        ++mismatches;
        break;
      }
      const double alpha = c.alpha01 / (c.alpha02 + c.alpha03 * std::cbrt(static_cast<double>(r)));
      const Vector grad = p.eval_grad_f(x);
      Vector next(d);
      for (std::size_t i = 0; i < d; ++i) next[i] = x[i] - alpha * grad[i];
      x = proj(next);
    }
    if (std::memcmp(x.data(), res.x_final.data(), d * sizeof(double)) != 0) ++mismatches;
  }
  return {mismatches == 0, fmt("20 seeds, %zu iterates compared bit for bit, %zu mismatching runs "
                               "(%zu runs stopped at an exact stationary point)",
                               compared, mismatches, early_stops)};
}

// 5. Finite-difference checks of every bundled problem.
Outcome criterion_5() {
  std::vector<ConstrainedProblem> all;
  for (AnalyticId id : {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior, AnalyticId::Scaled1d}) {
    all.push_back(problems::build_analytic(id).problem);
  }
  const auto data = problems::generate_synthetic_mnpc(0, 3, 20, 50, 1.0);
  all.push_back(problems::build_mnpc(data, 1.0, Vector{0.1, 0.1}));
  all.push_back(problems::build_nn_budget(data, 8, Vector{0.2, 0.2}));
  auto model = problems::generate_random_cmdp(0, 10, 4, 2, 0.9);
  model.thresholds = {0.5, 0.5};
  all.push_back(problems::build_cmdp(model));

  Outcome out{true, ""};
  for (const ConstrainedProblem& p : all) {
    const auto rep = check_gradients(p, sample_points(p, 20, 2024), 1e-6);
    const bool ok = rep.passes(1e-5);
    out.pass = out.pass && ok;
    out.detail += fmt("%s grad %.1e jac %.1e; ", p.name.c_str(), rep.max_grad_error,
                      rep.max_jacobian_error.value_or(0.0));
  }
  out.detail += "tolerance 1e-5";
  return out;
}

// 6. CMDP with a threshold at 90% of the best attainable constraint return.
Outcome criterion_6() {
  const auto base = problems::generate_random_cmdp(7, 20, 5, 1, 0.9);
  const Vector& G = base.constraint_rewards[0];
  GdpaConfig c = GdpaConfig::cmdp_preset();
  c.max_iters = 100000;
  c.record_every = 1000;
  c.record_dense_until = 0;
  c.eps_stat = 1e-300;
  const Vector theta0(base.num_states * base.num_actions, 0.0);

  // Preliminary unconstrained runs: maximize G alone, then R alone.
  problems::TabularCmdp g_only = base;
  g_only.reward = G;
  g_only.constraint_rewards.clear();
  g_only.thresholds.clear();
  const SolveResult g_run = solve(problems::build_cmdp(g_only), c, theta0);
  const double g_best = problems::evaluate_policy(base, g_run.x_final, G).normalized_return;
  const double b = 0.9 * g_best;

  problems::TabularCmdp r_only = base;
  r_only.constraint_rewards.clear();
  r_only.thresholds.clear();
  const SolveResult r_run = solve(problems::build_cmdp(r_only), c, theta0);
  const double g_of_r = problems::evaluate_policy(base, r_run.x_final, G).normalized_return;

  problems::TabularCmdp constrained = base;
  constrained.thresholds = {b};
  const SolveResult res = solve(problems::build_cmdp(constrained), c, theta0);
  const double g_gdpa = problems::evaluate_policy(base, res.x_final, G).normalized_return;
  const double r_gdpa = problems::evaluate_policy(base, res.x_final, base.reward).normalized_return;

  const double need = b - 0.02 * std::abs(b);
  const bool ok = res.termination != Termination::NumericalFailure && g_gdpa >= need && g_of_r < b;
  return {ok, fmt("b = 0.9 * %.4f = %.4f; GDPA constraint return %.4f (>= %.4f), reward %.4f; "
                  "unconstrained reward-optimal policy constraint return %.4f (< b)",
                  g_best, b, g_gdpa, need, r_gdpa, g_of_r)};
}

// 7. Residuals vanish at the analytic pairs; averages match a recomputation.
Outcome criterion_7() {
  double worst_kkt = 0.0;
  for (AnalyticId id : {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior, AnalyticId::Scaled1d}) {
    const auto inst = problems::build_analytic(id);
    worst_kkt = std::max(worst_kkt, kkt_residual(inst.problem, inst.x_star, inst.lambda_star, 1.0).max());
  }
  double worst_avg = 0.0;
  for (AnalyticId id : {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior, AnalyticId::Scaled1d}) {
    const auto inst = problems::build_analytic(id);
    GdpaConfig c;
    c.max_iters = 5000;
    c.keep_iterates = true;
    const SolveResult res = solve(inst.problem, c, inst.x0);
    const Vector xa = weighted_average(res.x_history, res.beta_history);
    const Vector la = weighted_average(res.lambda_history, res.beta_history);
    worst_avg = std::max(worst_avg, norm2(subtract(xa, res.x_avg)));
    worst_avg = std::max(worst_avg, norm2(subtract(la, res.lambda_avg)));
  }
  return {worst_kkt <= 1e-10 && worst_avg <= 1e-10,
          fmt("max KKT residual at analytic pairs %.2e (<=1e-10); averaged-iterate discrepancy %.2e (<=1e-10)",
              worst_kkt, worst_avg)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GDPA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8. The same config and seed give the same trace.csv bytes.
Outcome criterion_8() {
  const auto dir = testing::fresh_dir("acceptance-determinism");
  const std::pair<const char*, const char*> configs[] = {
      {"analytic", R"({"problem": {"type": "analytic", "instance": "halfspace-quadratic"}, "budget": 100000})"},
      {"mnpc", R"({"problem": {"type": "mnpc"}, "solver": {"name": "gdpa", "preset": "mnpc"}, "budget": 3000})"},
      {"cmdp", R"({"problem": {"type": "cmdp"}, "solver": {"name": "gdpa", "preset": "cmdp"}, "budget": 3000})"},
  };
  Outcome out{true, ""};
  for (const auto& [name, text] : configs) {
    const auto cfg_path = dir / (std::string(name) + ".json");
    harness::write_text_file(cfg_path, text);
    std::string traces[2];
    for (int run = 0; run < 2; ++run) {
      const auto out_dir = dir / (std::string(name) + "-" + std::to_string(run));
      const int code = run_cli("solve --config " + cfg_path.string() + " --out " + out_dir.string() + " --seed 11");
      if (code != 0) {
        out.pass = false;
        out.detail += fmt("%s: exit %d; ", name, code);
      }
      traces[run] = harness::read_text_file(out_dir / "trace.csv");
    }
    const bool same = !traces[0].empty() && traces[0] == traces[1];
    out.pass = out.pass && same;
    out.detail += fmt("%s: %zu bytes %s; ", name, traces[0].size(), same ? "identical" : "DIFFER");
  }
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--only N]...\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "analytic KKT recovery", criterion_1},
      {2, "rate orders", criterion_2},
      {3, "dual contraction", criterion_3},
      {4, "reduction to projected gradient descent", criterion_4},
      {5, "gradient and Jacobian verification", criterion_5},
      {6, "CMDP constraint satisfaction", criterion_6},
      {7, "metric self-consistency", criterion_7},
      {8, "determinism", criterion_8},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
