#include <stdexcept>
#include <string>

#include "gdpa/metrics.hpp"
#include "gdpa/problems.hpp"

namespace gdpa::problems {

std::string_view analytic_name(AnalyticId id) {
  switch (id) {
    case AnalyticId::HalfspaceQuadratic:
      return "halfspace-quadratic";
    case AnalyticId::CircleExterior:
      return "circle-exterior";
    case AnalyticId::Scaled1d:
      return "scaled-1d";
  }
  return "unknown";
}

AnalyticId analytic_from_name(std::string_view name) {
  for (AnalyticId id :
       {AnalyticId::HalfspaceQuadratic, AnalyticId::CircleExterior, AnalyticId::Scaled1d}) {
    if (analytic_name(id) == name) return id;
  }
  throw std::invalid_argument("unknown analytic instance '" + std::string(name) + "'");
}

namespace {

AnalyticInstance halfspace(std::size_t d) {
  if (d == 0) throw std::invalid_argument("halfspace-quadratic: dimension must be positive");
  AnalyticInstance inst{AnalyticId::HalfspaceQuadratic, {}, {}, {}, {}};
  auto& p = inst.problem;
  p.name = "halfspace-quadratic";
  p.dim = d;
  p.num_constraints = 1;
  p.eval_f = [](ConstSpan x) { return norm2_sq(x); };
  p.eval_grad_f = [](ConstSpan x) { return scaled(2.0, x); };
  p.eval_g = [](ConstSpan x) {
    double s = 0.0;
    for (double v : x) s += v;
    return Vector{1.0 - s};
  };
  p.eval_jacobian = [d](ConstSpan) { return Matrix(1, d, -1.0); };
  p.projection = ProjectionSpec::identity();
  inst.x_star.assign(d, 1.0 / static_cast<double>(d));
  inst.lambda_star = {2.0 / static_cast<double>(d)};
  inst.x0.assign(d, 0.0);
  return inst;
}

AnalyticInstance circle_exterior() {
  AnalyticInstance inst{AnalyticId::CircleExterior, {}, {}, {}, {}};
  auto& p = inst.problem;
  const Vector center{0.5, 0.0};
  p.name = "circle-exterior";
  p.dim = 2;
  p.num_constraints = 1;
  p.eval_f = [center](ConstSpan x) { return norm2_sq(subtract(x, center)); };
  p.eval_grad_f = [center](ConstSpan x) { return scaled(2.0, subtract(x, center)); };
  p.eval_g = [](ConstSpan x) { return Vector{1.0 - norm2_sq(x)}; };
  p.eval_jacobian = [](ConstSpan x) { return Matrix(1, 2, {-2.0 * x[0], -2.0 * x[1]}); };
  p.projection = ProjectionSpec::identity();
  p.sample_halfwidth = 2.0;
  // 2(x - c) - 2 lambda x = 0 at x = (1, 0) gives lambda = 1 - c_0 = 0.5.
  inst.x_star = {1.0, 0.0};
  inst.lambda_star = {0.5};
  inst.x0 = {0.6, 0.2};
  return inst;
}

AnalyticInstance scaled_1d() {
  AnalyticInstance inst{AnalyticId::Scaled1d, {}, {}, {}, {}};
  auto& p = inst.problem;
  p.name = "scaled-1d";
  p.dim = 1;
  p.num_constraints = 1;
  p.eval_f = [](ConstSpan x) { return x[0] * x[0]; };
  p.eval_grad_f = [](ConstSpan x) { return Vector{2.0 * x[0]}; };
  p.eval_g = [](ConstSpan x) { return Vector{1.0 - x[0]}; };
  p.eval_jacobian = [](ConstSpan) { return Matrix(1, 1, -1.0); };
  p.projection = ProjectionSpec::identity();
  p.sample_halfwidth = 2.0;
  inst.x_star = {1.0};
  inst.lambda_star = {2.0};
  inst.x0 = {0.0};
  return inst;
}

}  // namespace

AnalyticInstance build_analytic(AnalyticId id, std::size_t dim) {
  AnalyticInstance inst = id == AnalyticId::HalfspaceQuadratic ? halfspace(dim)
                          : id == AnalyticId::CircleExterior   ? circle_exterior()
                                                               : scaled_1d();
  inst.problem.validate();
  const KktResidual res = kkt_residual(inst.problem, inst.x_star, inst.lambda_star, 1.0);
  if (res.max() > 1e-10) {
    throw std::logic_error(inst.problem.name + ": stored KKT pair fails verification");
  }
  return inst;
}

}  // namespace gdpa::problems
