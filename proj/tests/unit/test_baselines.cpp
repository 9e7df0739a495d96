#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gdpa/baselines.hpp"
#include "gdpa/problems.hpp"
#include "test_support.hpp"

using namespace gdpa;
using problems::AnalyticId;

TEST_CASE("penalty config validation") {
  PenaltyConfig c;
  CHECK_NOTHROW(c.validate());
  c.rho_growth = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PenaltyConfig{};
  c.inner_iters = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  AlmConfig a;
  CHECK(a.outer_iters == 20);
  a.stall_ratio = 0.0;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("penalty method tracks the closed-form penalized minimizer") {
  // min x^2 + (rho/2)(1 - x)_+^2 has minimizer x = rho / (2 + rho), violation 2 / (2 + rho).
  const auto inst = problems::build_analytic(AnalyticId::Scaled1d);
  const SolveResult res = solve_penalty(inst.problem, PenaltyConfig{}, inst.x0);
  CHECK(res.termination == Termination::FeasibilityStop);
  const double rho = res.final_beta;
  CHECK(res.x_final[0] == doctest::Approx(rho / (2.0 + rho)).epsilon(1e-9));
  CHECK(1.0 - res.x_final[0] <= PenaltyConfig{}.feas_tol);
  REQUIRE(res.T_eps);
  CHECK(*res.T_eps <= res.iterations);
  CHECK(res.lambda_final == Vector{0.0});
}

TEST_CASE("augmented Lagrangian recovers the multiplier") {
  const auto inst = problems::build_analytic(AnalyticId::Scaled1d);
  const SolveResult res = solve_alm(inst.problem, AlmConfig{}, inst.x0);
  CHECK(res.termination == Termination::FeasibilityStop);
  CHECK(res.x_final[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.lambda_final[0] == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("augmented Lagrangian on the circle instance") {
  const auto inst = problems::build_analytic(AnalyticId::CircleExterior);
  const SolveResult res = solve_alm(inst.problem, AlmConfig{}, inst.x0);
  CHECK(norm2(subtract(res.x_final, inst.x_star)) < 1e-2);
  CHECK(std::abs(res.lambda_final[0] - inst.lambda_star[0]) < 5e-2);
}

TEST_CASE("baselines respect the gradient-evaluation cap and trace schema") {
  const auto inst = problems::build_analytic(AnalyticId::HalfspaceQuadratic);
  PenaltyConfig c;
  c.max_grad_evals = 1234;
  c.feas_tol = 1e-12;
  const SolveResult res = solve_penalty(inst.problem, c, inst.x0);
  CHECK(res.iterations == 1234);
  CHECK(res.termination == Termination::BudgetExhausted);
  std::size_t last = 0;
  for (const IterationRecord& rec : res.trace) {
    CHECK(rec.r > last);
    last = rec.r;
    CHECK(rec.gamma == 0.0);
    CHECK(rec.alpha == doctest::Approx(c.inner_step / (1.0 + rec.beta)));
  }
  CHECK(last <= 1234);
}

TEST_CASE("alm rejects bad multipliers") {
  const auto inst = problems::build_analytic(AnalyticId::Scaled1d);
  CHECK_THROWS_AS(solve_alm(inst.problem, AlmConfig{}, inst.x0, Vector{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_alm(inst.problem, AlmConfig{}, inst.x0, Vector{1.0, 1.0}), std::invalid_argument);
}
