#include "gdpa/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "gdpa/errors.hpp"

namespace gdpa {

namespace {

void check_nonnegative(const std::optional<double>& v, const char* name) {
  if (v && !(*v >= 0.0)) throw std::invalid_argument(std::string("constant ") + name + " must be >= 0");
}

std::string describe_point(std::size_t index, ConstSpan x) {
  std::ostringstream os;
  os << "sample point " << index << " (x = [";
  for (std::size_t i = 0; i < x.size() && i < 6; ++i) os << (i ? ", " : "") << x[i];
  if (x.size() > 6) os << ", ...";
  os << "])";
  return os.str();
}

}  // namespace

void ProblemConstants::validate() const {
  check_nonnegative(grad_f_lipschitz, "L_f");
  check_nonnegative(g_lipschitz, "L_g");
  check_nonnegative(jacobian_lipschitz, "L_J");
  check_nonnegative(grad_f_bound, "M");
  check_nonnegative(violation_sq_bound, "G");
  check_nonnegative(jacobian_bound, "U_J");
  if (sigma && !(*sigma > 0.0)) throw std::invalid_argument("constant sigma must be > 0");
}

void ConstrainedProblem::validate() const {
  if (dim == 0) throw std::invalid_argument(name + ": dimension must be positive");
  if (!eval_f || !eval_grad_f) throw std::invalid_argument(name + ": objective callbacks missing");
  if (num_constraints > 0 && (!eval_g || !eval_jacobian)) {
    throw std::invalid_argument(name + ": constraint callbacks missing");
  }
  if (!projection.accepts_dimension(dim)) {
    throw std::invalid_argument(name + ": projection set does not match the dimension");
  }
  if (!(sample_halfwidth > 0.0)) throw std::invalid_argument(name + ": sample_halfwidth must be > 0");
  constants.validate();
}

double ConstrainedProblem::f(ConstSpan x) const {
  require_same_size(x.size(), dim, "f(x)");
  const double v = eval_f(x);
  require_finite(v, name + ": f(x)");
  return v;
}

Vector ConstrainedProblem::grad_f(ConstSpan x) const {
  require_same_size(x.size(), dim, "grad f(x)");
  Vector v = eval_grad_f(x);
  require_same_size(v.size(), dim, name + ": grad f output");
  require_finite(v, name + ": grad f(x)");
  return v;
}

Vector ConstrainedProblem::g(ConstSpan x) const {
  require_same_size(x.size(), dim, "g(x)");
  if (num_constraints == 0) return {};
  Vector v = eval_g(x);
  require_same_size(v.size(), num_constraints, name + ": g output");
  require_finite(v, name + ": g(x)");
  return v;
}

Matrix ConstrainedProblem::jacobian(ConstSpan x) const {
  require_same_size(x.size(), dim, "J(x)");
  if (num_constraints == 0) return Matrix(0, dim);
  Matrix j = eval_jacobian(x);
  if (j.rows() != num_constraints || j.cols() != dim) {
    throw std::invalid_argument(name + ": Jacobian has shape " + std::to_string(j.rows()) + "x" +
                                std::to_string(j.cols()));
  }
  require_finite(j.data(), name + ": J(x)");
  return j;
}

std::vector<Vector> sample_points(const ConstrainedProblem& p, std::size_t count,
                                  std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  std::uniform_real_distribution<double> unif{-p.sample_halfwidth, p.sample_halfwidth};
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector x(p.dim);
    for (double& xi : x) xi = unif(rng);
    out.push_back(p.projection.project(x));
  }
  return out;
}

GradientCheckReport check_gradients(const ConstrainedProblem& p, const std::vector<Vector>& points,
                                    double h) {
  if (!(h > 0.0)) throw std::invalid_argument("check_gradients: step h must be positive");
  GradientCheckReport report;
  report.num_points = points.size();
  if (p.num_constraints > 0) report.max_jacobian_error = 0.0;

  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vector x = p.projection.project(points[k]);
    try {
      const Vector grad = p.grad_f(x);
      const Matrix jac = p.jacobian(x);
      Vector fd_grad(p.dim);
      Matrix fd_jac(p.num_constraints, p.dim);
      Vector probe = x;
      for (std::size_t j = 0; j < p.dim; ++j) {
        probe[j] = x[j] + h;
        const double f_hi = p.f(probe);
        const Vector g_hi = p.g(probe);
        probe[j] = x[j] - h;
        const double f_lo = p.f(probe);
        const Vector g_lo = p.g(probe);
        probe[j] = x[j];
        fd_grad[j] = (f_hi - f_lo) / (2.0 * h);
        for (std::size_t i = 0; i < p.num_constraints; ++i) fd_jac(i, j) = (g_hi[i] - g_lo[i]) / (2.0 * h);
      }
      const double grad_err = norm2(subtract(fd_grad, grad)) / std::max(1.0, norm2(grad));
      if (grad_err >= report.max_grad_error) {
        report.max_grad_error = grad_err;
        report.worst_grad_point = k;
      }
      if (p.num_constraints > 0) {
        const double jac_err =
            norm2(subtract(fd_jac.data(), jac.data())) / std::max(1.0, norm2(jac.data()));
        if (jac_err >= *report.max_jacobian_error) {
          report.max_jacobian_error = jac_err;
          report.worst_jacobian_point = k;
        }
      }
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(std::string(e.what()) + " at " + describe_point(k, x));
    }
  }
  return report;
}

namespace {

// dist(v, -N_X(x)) for the supported sets.
double distance_to_negative_normal_cone(const ProjectionSpec& set, ConstSpan x, ConstSpan v) {
  if (set.kind() == ProjectionSpec::Kind::Identity) return norm2(v);
  const auto* box = set.as_box();
  if (box == nullptr) {
    throw UnsupportedOperation("estimate_sigma: feasible set '" + std::string(set.kind_name()) +
                               "' is not supported (only R^d and boxes)");
  }
  // -N_X(x) allows any nonnegative component at an active lower bound and any
  // nonpositive component at an active upper bound.
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = box->lower[i];
    const double hi = box->upper[i];
    const bool at_lo = x[i] <= lo + 1e-12 * std::max(1.0, std::abs(lo));
    const bool at_hi = x[i] >= hi - 1e-12 * std::max(1.0, std::abs(hi));
    double r = v[i];
    if (at_lo && at_hi) {
      r = 0.0;
    } else if (at_lo) {
      r = std::min(v[i], 0.0);
    } else if (at_hi) {
      r = std::max(v[i], 0.0);
    }
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace

double estimate_sigma(const ConstrainedProblem& p, const std::vector<Vector>& samples) {
  const auto kind = p.projection.kind();
  if (kind != ProjectionSpec::Kind::Identity && kind != ProjectionSpec::Kind::Box) {
    throw UnsupportedOperation("estimate_sigma: feasible set '" +
                               std::string(p.projection.kind_name()) +
                               "' is not supported (only R^d and boxes)");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& x : samples) {
    const Vector gplus = positive_part(p.g(x));
    const double viol = norm2(gplus);
    if (!(viol > 0.0)) continue;
    const Vector direction = transpose_times(p.jacobian(x), gplus);
    best = std::min(best, distance_to_negative_normal_cone(p.projection, x, direction) / viol);
  }
  return best;
}

double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(
      m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(view);
  return svd.singularValues()(0);
}

ProblemConstants effective_constants(const ConstrainedProblem& p, std::size_t sample_budget,
                                     std::uint64_t seed) {
  if (sample_budget < 2) throw std::invalid_argument("effective_constants: sample_budget must be >= 2");
  const ProblemConstants& given = p.constants;
  ProblemConstants out = given;

  const std::vector<Vector> xs = sample_points(p, sample_budget, seed);
  std::vector<Vector> grads;
  std::vector<Vector> gs;
  std::vector<Matrix> jacs;
  for (const Vector& x : xs) {
    grads.push_back(p.grad_f(x));
    gs.push_back(p.g(x));
    jacs.push_back(p.jacobian(x));
  }

  double lf = 0.0, lg = 0.0, lj = 0.0, m = 0.0, gb = 0.0, uj = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    m = std::max(m, norm2(grads[a]));
    gb = std::max(gb, norm2_sq(positive_part(gs[a])));
    uj = std::max(uj, spectral_norm(jacs[a]));
    // sup ||J|| is the Lipschitz constant of g on a convex set, so it also
    // bounds the secant ratios below.
    lg = std::max(lg, uj);
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      const double dx = norm2(subtract(xs[a], xs[b]));
      if (dx < 1e-12) continue;
      lf = std::max(lf, norm2(subtract(grads[a], grads[b])) / dx);
      if (p.num_constraints > 0) {
        lg = std::max(lg, norm2(subtract(gs[a], gs[b])) / dx);
        Matrix diff(p.num_constraints, p.dim, subtract(jacs[a].data(), jacs[b].data()));
        lj = std::max(lj, spectral_norm(diff) / dx);
      }
    }
  }

  auto fill = [&](std::optional<double>& slot, double estimate, const char* label) {
    if (slot) {
      spdlog::debug("{}: constant {} supplied = {}", p.name, label, *slot);
      return;
    }
    slot = kConstantSafetyFactor * estimate;
    spdlog::info("{}: estimated {} = {} ({} samples, x{} safety)", p.name, label, *slot,
                 sample_budget, kConstantSafetyFactor);
  };
  fill(out.grad_f_lipschitz, lf, "L_f");
  fill(out.g_lipschitz, lg, "L_g");
  fill(out.jacobian_lipschitz, lj, "L_J");
  fill(out.grad_f_bound, m, "M");
  fill(out.violation_sq_bound, gb, "G");
  fill(out.jacobian_bound, uj, "U_J");

  if (!out.sigma) {
    const auto kind = p.projection.kind();
    if (kind == ProjectionSpec::Kind::Identity || kind == ProjectionSpec::Kind::Box) {
      out.sigma = estimate_sigma(p, xs) / kConstantSafetyFactor;
      spdlog::info("{}: estimated sigma = {} (sampled, /{} safety; heuristic)", p.name, *out.sigma,
                   kConstantSafetyFactor);
    } else {
      spdlog::info("{}: sigma not estimated for feasible set '{}'", p.name, p.projection.kind_name());
    }
  }
  return out;
}

}  // namespace gdpa
