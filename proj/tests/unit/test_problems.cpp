#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gdpa/errors.hpp"
#include "gdpa/metrics.hpp"
#include "gdpa/problems.hpp"
#include "test_support.hpp"

using namespace gdpa;
using namespace gdpa::problems;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out{p};
  out << text;
}

// Policy evaluation by fixed-point iteration, independent of the linear solve.
Vector iterate_values(const TabularCmdp& m, const Vector& pi, const Vector& rewards) {
  const std::size_t S = m.num_states, A = m.num_actions;
  Vector v(S, 0.0);
  for (int it = 0; it < 2000; ++it) {
    Vector next(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        double ev = 0.0;
        for (std::size_t s2 = 0; s2 < S; ++s2) ev += m.transition(s, a, s2) * v[s2];
        next[s] += pi[s * A + a] * (rewards[s * A + a] + m.gamma * ev);
      }
    }
    v = next;
  }
  return v;
}

}  // namespace

TEST_CASE("analytic instance names") {
  for (AnalyticId id : {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior, AnalyticId::Scaled1d}) {
    CHECK(analytic_from_name(analytic_name(id)) == id);
  }
  CHECK_THROWS_AS(analytic_from_name("nope"), std::invalid_argument);
}

TEST_CASE("analytic instances carry verified KKT pairs") {
  const auto half = build_analytic(AnalyticId::HalfspaceQuadratic);
  CHECK(half.x_star == Vector{0.5, 0.5});
  CHECK(half.lambda_star == Vector{1.0});
  const auto half5 = build_analytic(AnalyticId::HalfspaceQuadratic, 5);
  for (double v : half5.x_star) CHECK(v == doctest::Approx(0.2));
  CHECK(half5.lambda_star[0] == doctest::Approx(0.4));

  const auto circle = build_analytic(AnalyticId::CircleExterior);
  CHECK(circle.x_star == Vector{1.0, 0.0});
  CHECK(circle.lambda_star[0] == doctest::Approx(0.5));

  const auto scaled = build_analytic(AnalyticId::Scaled1d);
  CHECK(scaled.x_star == Vector{1.0});
  CHECK(scaled.lambda_star == Vector{2.0});

  for (const auto* inst : {&half, &half5, &circle, &scaled}) {
    CHECK(kkt_residual(inst->problem, inst->x_star, inst->lambda_star, 1.0).max() <= 1e-10);
    CHECK(inst->x0.size() == inst->problem.dim);
  }
  CHECK_THROWS_AS(build_analytic(AnalyticId::HalfspaceQuadratic, 0), std::invalid_argument);
}

TEST_CASE("synthetic datasets are seeded and balanced") {
  const auto a = generate_synthetic_mnpc(3, 4, 5, 7, 0.5);
  const auto b = generate_synthetic_mnpc(3, 4, 5, 7, 0.5);
  CHECK(a.samples.size() == 28);
  CHECK(a.class_counts() == std::vector<std::size_t>(4, 7));
  CHECK(a.feature_dim == 5);
  for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].features == b.samples[k].features);
  CHECK_NOTHROW(a.validate());

  // Without noise every sample sits on its class mean at radius 2.
  const auto clean = generate_synthetic_mnpc(1, 3, 4, 2, 0.0);
  for (const Sample& s : clean.samples) CHECK(norm2(s.features) == doctest::Approx(2.0));
  CHECK_THROWS_AS(generate_synthetic_mnpc(1, 0, 4, 2, 0.1), std::invalid_argument);
}

TEST_CASE("csv datasets") {
  const auto dir = testing::fresh_dir("csv");
  write_file(dir / "ok.csv", "class_id,f1,f2\n0,1.5,2\n2,-1,0.25\n1,0,0\n");
  const auto data = load_csv_dataset(dir / "ok.csv");
  CHECK(data.num_classes == 3);
  CHECK(data.feature_dim == 2);
  REQUIRE(data.samples.size() == 3);
  CHECK(data.samples[1].label == 2);
  CHECK(data.samples[1].features == Vector{-1.0, 0.25});

  write_file(dir / "header.csv", "class_id,f1\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(dir / "header.csv"), doctest::Contains("empty dataset"),
                       std::invalid_argument);

  write_file(dir / "ragged.csv", "class_id,f1,f2\n0,1,2\n1,3\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(dir / "ragged.csv"), doctest::Contains("ragged.csv:3"),
                       std::invalid_argument);

  write_file(dir / "bad.csv", "class_id,f1\n0,abc\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(dir / "bad.csv"), doctest::Contains("bad.csv:2"), std::invalid_argument);

  CHECK_THROWS_AS(load_csv_dataset(dir / "missing.csv"), std::invalid_argument);
}

TEST_CASE("mnpc values at the origin") {
  // Every sigmoid term is s(0) = 1/2 and there are K - 1 of them per sample.
  const auto data = generate_synthetic_mnpc(2, 4, 3, 10, 1.0);
  const ConstrainedProblem p = build_mnpc(data, 1.0, Vector{0.1, 0.2, 0.3});
  CHECK(p.dim == 12);
  CHECK(p.num_constraints == 3);
  const Vector zero(12, 0.0);
  CHECK(p.f(zero) == doctest::Approx(1.5));
  const Vector g = p.g(zero);
  CHECK(g[0] == doctest::Approx(1.4));
  CHECK(g[1] == doctest::Approx(1.3));
  CHECK(g[2] == doctest::Approx(1.2));
  CHECK_THROWS_AS(build_mnpc(data, 1.0, Vector{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(build_mnpc(data, -1.0, Vector{0.1, 0.2, 0.3}), std::invalid_argument);
}

TEST_CASE("mnpc regularizer is squared") {
  const auto data = generate_synthetic_mnpc(2, 2, 2, 5, 1.0);
  const ConstrainedProblem with = build_mnpc(data, 2.0, Vector{0.1});
  const ConstrainedProblem without = build_mnpc(data, 0.0, Vector{0.1});
  const Vector x{0.3, -0.1, 0.2, 0.4};
  CHECK(with.f(x) - without.f(x) == doctest::Approx(norm2_sq(x)));
}

TEST_CASE("nn budget problem") {
  const auto data = generate_synthetic_mnpc(5, 3, 4, 6, 1.0);
  const ConstrainedProblem p = build_nn_budget(data, 8, Vector{0.2, std::numeric_limits<double>::infinity()});
  CHECK(p.dim == 8 * 4 + 3 * 8);
  // Zero weights: every output is 1/2, so each loss is (1/K)[(1/2)^2 K] = 1/4.
  const Vector zero(p.dim, 0.0);
  CHECK(p.f(zero) == doctest::Approx(0.25));
  const Vector g = p.g(zero);
  CHECK(g[0] == doctest::Approx(0.05));
  CHECK(g[1] == -1.0);
  std::mt19937_64 rng{1};
  const Matrix jac = p.jacobian(testing::random_vector(rng, p.dim));
  for (double v : jac.row(1)) CHECK(v == 0.0);
  CHECK_THROWS_AS(build_nn_budget(data, 0, Vector{0.2, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(build_nn_budget(data, 4, Vector{0.2, std::nan("")}), std::invalid_argument);
}

TEST_CASE("bundled problems pass the gradient check") {
  std::vector<ConstrainedProblem> all;
  for (AnalyticId id : {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior, AnalyticId::Scaled1d}) {
    all.push_back(build_analytic(id).problem);
  }
  const auto data = generate_synthetic_mnpc(0, 3, 20, 30, 1.0);
  all.push_back(build_mnpc(data, 1.0, Vector{0.1, 0.1}));
  all.push_back(build_nn_budget(data, 8, Vector{0.2, 0.2}));
  auto model = generate_random_cmdp(0, 10, 4, 2, 0.9);
  model.thresholds = {0.5, 0.5};
  all.push_back(build_cmdp(model));
  for (const ConstrainedProblem& p : all) {
    CAPTURE(p.name);
    const auto rep = check_gradients(p, sample_points(p, 20, 42), 1e-6);
    CHECK(rep.max_grad_error <= 1e-5);
    REQUIRE(rep.max_jacobian_error);
    CHECK(*rep.max_jacobian_error <= 1e-5);
  }
}

TEST_CASE("cmdp model validation") {
  auto m = generate_random_cmdp(1, 3, 2, 1, 0.9);
  CHECK_NOTHROW(m.validate());
  for (std::size_t row = 0; row < 6; ++row) {
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < 3; ++s2) total += m.transitions[row * 3 + s2];
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  auto bad = m;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.transitions[0] += 0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.reward.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.thresholds.clear();
  CHECK_THROWS_AS(build_cmdp(bad), std::invalid_argument);
}

TEST_CASE("softmax policy") {
  const Vector pi = softmax_policy(Vector{0.0, 0.0, 1000.0, 0.0}, 2, 2);
  CHECK(pi[0] == doctest::Approx(0.5));
  CHECK(pi[1] == doctest::Approx(0.5));
  CHECK(pi[2] == doctest::Approx(1.0));
  CHECK(pi[3] == doctest::Approx(0.0));
  CHECK_THROWS_AS(softmax_policy(Vector{0.0, std::numeric_limits<double>::infinity()}, 1, 2), NumericalFailure);
}

TEST_CASE("myopic cmdp return is the mean reward under the policy") {
  auto m = generate_random_cmdp(4, 5, 3, 1, 0.0);
  const Vector theta(15, 0.0);
  const auto eval = evaluate_policy(m, theta, m.reward);
  const double mean = std::accumulate(m.reward.begin(), m.reward.end(), 0.0) / 15.0;
  CHECK(eval.normalized_return == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("policy evaluation agrees with fixed-point iteration") {
  std::mt19937_64 rng{8};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = generate_random_cmdp(seed, 6, 3, 1, 0.8);
    const Vector theta = testing::random_vector(rng, 18, -2.0, 2.0);
    const auto eval = evaluate_policy(m, theta, m.constraint_rewards[0]);
    const Vector v = iterate_values(m, eval.policy, m.constraint_rewards[0]);
    for (std::size_t s = 0; s < 6; ++s) CHECK(eval.value[s] == doctest::Approx(v[s]).epsilon(1e-10));
    CHECK(bellman_residual(m, eval, m.constraint_rewards[0]) <= 1e-12);
    CHECK(std::accumulate(eval.occupancy.begin(), eval.occupancy.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cmdp problem signs") {
  auto m = generate_random_cmdp(2, 4, 2, 1, 0.9);
  m.thresholds = {0.3};
  const ConstrainedProblem p = build_cmdp(m);
  const Vector theta(8, 0.1);
  const double ret_r = evaluate_policy(m, theta, m.reward).normalized_return;
  const double ret_g = evaluate_policy(m, theta, m.constraint_rewards[0]).normalized_return;
  CHECK(p.f(theta) == doctest::Approx(-ret_r));
  CHECK(p.g(theta)[0] == doctest::Approx(0.3 - ret_g));
}

TEST_CASE("cmdp without constraints") {
  const auto m = generate_random_cmdp(0, 3, 2, 0, 0.5);
  const ConstrainedProblem p = build_cmdp(m);
  CHECK(p.num_constraints == 0);
  CHECK(p.g(Vector(6, 0.0)).empty());
}
