#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "common.hpp"
#include "gdpa/problems.hpp"

namespace gdpa::problems {

namespace {

struct TwoLayerNet {
  std::size_t d_in;
  std::size_t hidden;
  std::size_t outputs;
  std::vector<std::vector<Vector>> by_class;
  Vector budgets;

  std::size_t num_weights() const { return hidden * d_in + outputs * hidden; }

  // Mean per-sample MSE on one class split; accumulates its gradient into grad
  // when grad is non-null.
  double split_loss(ConstSpan w, std::size_t cls, Vector* grad) const {
    const ConstSpan w1 = w.first(hidden * d_in);
    const ConstSpan w2 = w.subspan(hidden * d_in, outputs * hidden);
    const auto& samples = by_class[cls];
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    const double inv_k = 1.0 / static_cast<double>(outputs);

    Vector h(hidden), y(outputs), delta2(outputs), back(hidden);
    double total = 0.0;
    for (const Vector& xi : samples) {
      for (std::size_t u = 0; u < hidden; ++u) h[u] = detail::sigmoid(dot(w1.subspan(u * d_in, d_in), xi));
      double loss = 0.0;
      for (std::size_t o = 0; o < outputs; ++o) {
        y[o] = detail::sigmoid(dot(w2.subspan(o * hidden, hidden), h));
        const double err = y[o] - (o == cls ? 1.0 : 0.0);
        loss += err * err;
        delta2[o] = 2.0 * inv_k * inv_n * err * y[o] * (1.0 - y[o]);
      }
      total += loss * inv_k;
      if (grad == nullptr) continue;

      MutSpan g1{grad->data(), hidden * d_in};
      MutSpan g2{grad->data() + hidden * d_in, outputs * hidden};
      std::fill(back.begin(), back.end(), 0.0);
      for (std::size_t o = 0; o < outputs; ++o) {
        axpy_inplace(delta2[o], h, g2.subspan(o * hidden, hidden));
        axpy_inplace(delta2[o], w2.subspan(o * hidden, hidden), back);
      }
      for (std::size_t u = 0; u < hidden; ++u) {
        const double delta1 = back[u] * h[u] * (1.0 - h[u]);
        axpy_inplace(delta1, xi, g1.subspan(u * d_in, d_in));
      }
    }
    return total * inv_n;
  }
};

}  // namespace

ConstrainedProblem build_nn_budget(const MnpcDataset& data, std::size_t hidden, const Vector& budgets) {
  data.validate();
  if (hidden == 0) throw std::invalid_argument("nn: hidden width must be positive");
  const std::size_t m = data.num_classes - 1;
  require_same_size(budgets.size(), m, "nn budgets");
  for (double b : budgets) {
    if (std::isnan(b) || b == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("nn: budgets must be finite or +infinity");
    }
  }

  auto net = std::make_shared<TwoLayerNet>();
  net->d_in = data.feature_dim;
  net->hidden = hidden;
  net->outputs = data.num_classes;
  net->budgets = budgets;
  net->by_class.resize(data.num_classes);
  for (const Sample& s : data.samples) net->by_class[s.label].push_back(s.features);
  for (std::size_t c = 0; c < data.num_classes; ++c) {
    if (net->by_class[c].empty()) throw std::invalid_argument("nn: class " + std::to_string(c) + " has no samples");
  }

  ConstrainedProblem p;
  p.name = "nn-budget";
  p.dim = net->num_weights();
  p.num_constraints = m;
  p.eval_f = [net](ConstSpan w) { return net->split_loss(w, 0, nullptr); };
  p.eval_grad_f = [net](ConstSpan w) {
    Vector grad(net->num_weights(), 0.0);
    net->split_loss(w, 0, &grad);
    return grad;
  };
  p.eval_g = [net](ConstSpan w) {
    Vector g(net->budgets.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = std::isinf(net->budgets[i]) ? -1.0 : net->split_loss(w, i + 1, nullptr) - net->budgets[i];
    }
    return g;
  };
  p.eval_jacobian = [net](ConstSpan w) {
    const std::size_t n = net->num_weights();
    Matrix jac(net->budgets.size(), n);
    Vector row(n);
    for (std::size_t i = 0; i < net->budgets.size(); ++i) {
      if (std::isinf(net->budgets[i])) continue;
      std::fill(row.begin(), row.end(), 0.0);
      net->split_loss(w, i + 1, &row);
      std::copy(row.begin(), row.end(), jac.row(i).begin());
    }
    return jac;
  };
  p.projection = ProjectionSpec::identity();
  p.validate();
  return p;
}

}  // namespace gdpa::problems
