#include <memory>
#include <stdexcept>
#include <string>

#include "common.hpp"
#include "gdpa/problems.hpp"

namespace gdpa::problems {

namespace {

struct MnpcData {
  std::size_t classes;
  std::size_t d_in;
  double reg;
  Vector thresholds;
  std::vector<std::vector<Vector>> by_class;

  ConstSpan block(ConstSpan x, std::size_t i) const { return x.subspan(i * d_in, d_in); }

  // (1/n_j) sum_{xi in class j} sum_{i != j} s((x_i - x_j)^T xi); adds
  // `scale` times its gradient into grad when grad is non-null.
  double class_term(ConstSpan x, std::size_t j, Vector* grad, double scale = 1.0) const {
    const auto& samples = by_class[j];
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    double total = 0.0;
    Vector scores(classes);
    for (const Vector& xi : samples) {
      for (std::size_t i = 0; i < classes; ++i) scores[i] = dot(block(x, i), xi);
      for (std::size_t i = 0; i < classes; ++i) {
        if (i == j) continue;
        const double s = detail::sigmoid(scores[i] - scores[j]);
        total += s;
        if (grad != nullptr) {
          const double w = scale * inv_n * s * (1.0 - s);
          MutSpan gi{grad->data() + i * d_in, d_in};
          MutSpan gj{grad->data() + j * d_in, d_in};
          axpy_inplace(w, xi, gi);
          axpy_inplace(-w, xi, gj);
        }
      }
    }
    return total * inv_n;
  }
};

}  // namespace

ConstrainedProblem build_mnpc(const MnpcDataset& data, double reg_lambda, const Vector& thresholds) {
  data.validate();
  if (!(reg_lambda >= 0.0)) throw std::invalid_argument("mnpc: reg_lambda must be >= 0");
  const std::size_t m = data.num_classes - 1;
  require_same_size(thresholds.size(), m, "mnpc thresholds");
  require_finite(thresholds, "mnpc thresholds");

  auto d = std::make_shared<MnpcData>();
  d->classes = data.num_classes;
  d->d_in = data.feature_dim;
  d->reg = reg_lambda;
  d->thresholds = thresholds;
  d->by_class.resize(data.num_classes);
  for (const Sample& s : data.samples) d->by_class[s.label].push_back(s.features);
  for (std::size_t c = 0; c < data.num_classes; ++c) {
    if (d->by_class[c].empty()) {
      throw std::invalid_argument("mnpc: class " + std::to_string(c) + " has no samples");
    }
  }

  ConstrainedProblem p;
  p.name = "mnpc";
  p.dim = d->classes * d->d_in;
  p.num_constraints = m;
  p.eval_f = [d](ConstSpan x) { return 0.5 * d->reg * norm2_sq(x) + d->class_term(x, 0, nullptr); };
  p.eval_grad_f = [d](ConstSpan x) {
    Vector grad = scaled(d->reg, x);
    d->class_term(x, 0, &grad);
    return grad;
  };
  p.eval_g = [d](ConstSpan x) {
    Vector g(d->classes - 1);
    for (std::size_t j = 1; j < d->classes; ++j) g[j - 1] = d->class_term(x, j, nullptr) - d->thresholds[j - 1];
    return g;
  };
  p.eval_jacobian = [d](ConstSpan x) {
    const std::size_t dim = d->classes * d->d_in;
    Matrix jac(d->classes - 1, dim);
    Vector row(dim);
    for (std::size_t j = 1; j < d->classes; ++j) {
      std::fill(row.begin(), row.end(), 0.0);
      d->class_term(x, j, &row);
      std::copy(row.begin(), row.end(), jac.row(j - 1).begin());
    }
    return jac;
  };
  p.projection = ProjectionSpec::identity();
  p.validate();
  return p;
}

}  // namespace gdpa::problems
