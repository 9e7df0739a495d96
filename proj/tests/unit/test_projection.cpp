#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gdpa/projection.hpp"
#include "test_support.hpp"

using namespace gdpa;

namespace {

// Draws a random point of the set by rejection or construction, independent of project().
Vector random_member(const ProjectionSpec& set, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u{0.0, 1.0};
  switch (set.kind()) {
    case ProjectionSpec::Kind::Identity:
      return testing::random_vector(rng, d, -5.0, 5.0);
    case ProjectionSpec::Kind::Box: {
      const auto* b = set.as_box();
      Vector x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = b->lower[i] + u(rng) * (b->upper[i] - b->lower[i]);
      return x;
    }
    case ProjectionSpec::Kind::Ball: {
      const auto* b = set.as_ball();
      while (true) {
        Vector x = testing::random_vector(rng, d, -b->radius, b->radius);
        if (norm2(x) <= b->radius) return axpy(1.0, x, b->center);
      }
    }
    case ProjectionSpec::Kind::NonnegativeOrthant:
      return testing::random_vector(rng, d, 0.0, 5.0);
    case ProjectionSpec::Kind::SimplexBlocks: {
      const std::size_t k = set.as_simplex()->block_size;
      Vector x(d);
      for (std::size_t blk = 0; blk < d / k; ++blk) {
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) total += x[blk * k + i] = -std::log(1.0 - u(rng));
        for (std::size_t i = 0; i < k; ++i) x[blk * k + i] /= total;
      }
      return x;
    }
  }
  return {};
}

}  // namespace

TEST_CASE("identity leaves vectors alone") {
  const Vector v{1.5, -2.0};
  CHECK(ProjectionSpec::identity().project(v) == v);
}

TEST_CASE("box clamps each coordinate") {
  const auto box = ProjectionSpec::box({0.0, -1.0, 0.0}, {1.0, 1.0, 0.0});
  CHECK(box.project(Vector{2.0, -3.0, 0.5}) == Vector{1.0, -1.0, 0.0});
  CHECK(box.project(Vector{0.5, 0.25, 0.0}) == Vector{0.5, 0.25, 0.0});
  CHECK_THROWS_AS(box.project(Vector{1.0}), std::invalid_argument);
}

TEST_CASE("ball projection rescales toward the center") {
  const auto ball = ProjectionSpec::ball({1.0, 0.0}, 2.0);
  const Vector p = ball.project(Vector{5.0, 3.0});
  CHECK(p[0] == doctest::Approx(1.0 + 2.0 * 0.8));
  CHECK(p[1] == doctest::Approx(2.0 * 0.6));
  CHECK(ball.project(Vector{1.5, 0.5}) == Vector{1.5, 0.5});
}

TEST_CASE("orthant and simplex examples") {
  CHECK(ProjectionSpec::nonnegative_orthant().project(Vector{-1.0, 2.0}) == Vector{0.0, 2.0});

  const Vector a = project_simplex(Vector{0.5, 0.5, 0.5});
  for (double v : a) CHECK(v == doctest::Approx(1.0 / 3.0));
  CHECK(project_simplex(Vector{2.0, 0.0}) == Vector{1.0, 0.0});
  const Vector b = project_simplex(Vector{0.6, 0.3, -5.0});
  CHECK(b[0] == doctest::Approx(0.65));
  CHECK(b[1] == doctest::Approx(0.35));
  CHECK(b[2] == 0.0);

  const auto blocks = ProjectionSpec::simplex_blocks(2);
  const Vector c = blocks.project(Vector{2.0, 0.0, 0.5, 0.5});
  CHECK(c == Vector{1.0, 0.0, 0.5, 0.5});
  CHECK_FALSE(blocks.accepts_dimension(3));
  CHECK_THROWS_AS(blocks.project(Vector{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("invalid sets are rejected at construction") {
  CHECK_THROWS_AS(ProjectionSpec::box({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ProjectionSpec::box({0.0, 0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ProjectionSpec::ball({0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ProjectionSpec::ball({0.0}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ProjectionSpec::simplex_blocks(0), std::invalid_argument);
}

TEST_CASE("projections are idempotent and satisfy the obtuse-angle condition") {
  // p = P_X(v) iff <v - p, y - p> <= 0 for every y in X.
  std::mt19937_64 rng{77};
  const std::size_t d = 6;
  const std::vector<ProjectionSpec> sets{
      ProjectionSpec::identity(),
      ProjectionSpec::box(Vector(d, -0.5), Vector{0.5, 1.0, 0.0, 2.0, 0.25, 0.5}),
      ProjectionSpec::ball(Vector{0.1, -0.2, 0.3, 0.0, 0.0, 1.0}, 0.75),
      ProjectionSpec::nonnegative_orthant(),
      ProjectionSpec::simplex_blocks(3),
  };
  for (const auto& set : sets) {
    CAPTURE(set.kind_name());
    for (int trial = 0; trial < 200; ++trial) {
      const Vector v = testing::random_vector(rng, d, -3.0, 3.0);
      const Vector p = set.project(v);
      const Vector pp = set.project(p);
      for (std::size_t i = 0; i < d; ++i) CHECK(pp[i] == doctest::Approx(p[i]).epsilon(1e-12));
      for (int k = 0; k < 10; ++k) {
        const Vector y = random_member(set, d, rng);
        CHECK(dot(subtract(v, p), subtract(y, p)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("simplex projection lands on the simplex") {
  std::mt19937_64 rng{3};
  for (int trial = 0; trial < 500; ++trial) {
    const Vector v = testing::random_vector(rng, 1 + trial % 9, -4.0, 4.0);
    const Vector p = project_simplex(v);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : p) CHECK(x >= 0.0);
  }
}
