#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "gdpa/errors.hpp"
#include "gdpa/problems.hpp"

namespace gdpa::problems {

void TabularCmdp::validate() const {
  if (num_states == 0 || num_actions == 0) throw std::invalid_argument("cmdp: empty state or action space");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("cmdp: discount must lie in [0, 1)");
  const std::size_t sa = num_states * num_actions;
  require_same_size(transitions.size(), sa * num_states, "cmdp transitions");
  require_same_size(reward.size(), sa, "cmdp reward");
  require_same_size(thresholds.size(), constraint_rewards.size(), "cmdp thresholds");
  for (const Vector& g : constraint_rewards) require_same_size(g.size(), sa, "cmdp constraint reward");
  for (std::size_t row = 0; row < sa; ++row) {
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < num_states; ++s2) {
      const double pr = transitions[row * num_states + s2];
      if (!(pr >= 0.0)) throw std::invalid_argument("cmdp: negative transition probability");
      total += pr;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("cmdp: transition row " + std::to_string(row) + " sums to " +
                                  std::to_string(total));
    }
  }
}

TabularCmdp generate_random_cmdp(std::uint64_t seed, std::size_t num_states, std::size_t num_actions,
                                 std::size_t num_constraints, double gamma) {
  std::mt19937_64 rng{seed};
  std::uniform_real_distribution<double> unif{0.0, 1.0};
  TabularCmdp m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.gamma = gamma;
  const std::size_t sa = num_states * num_actions;
  m.transitions.resize(sa * num_states);
  for (std::size_t row = 0; row < sa; ++row) {
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < num_states; ++s2) {
      const double w = unif(rng);
      m.transitions[row * num_states + s2] = w;
      total += w;
    }
    for (std::size_t s2 = 0; s2 < num_states; ++s2) m.transitions[row * num_states + s2] /= total;
  }
  m.reward.resize(sa);
  for (double& r : m.reward) r = unif(rng);
  m.constraint_rewards.assign(num_constraints, Vector(sa));
  for (Vector& g : m.constraint_rewards) {
    for (double& r : g) r = unif(rng);
  }
  m.thresholds.assign(num_constraints, 0.0);
  m.validate();
  return m;
}

Vector softmax_policy(ConstSpan theta, std::size_t num_states, std::size_t num_actions) {
  require_same_size(theta.size(), num_states * num_actions, "softmax_policy");
  require_finite(theta, "softmax_policy: theta");
  Vector pi(theta.size());
  for (std::size_t s = 0; s < num_states; ++s) {
    const auto row = theta.subspan(s * num_actions, num_actions);
    const double top = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (std::size_t a = 0; a < num_actions; ++a) {
      pi[s * num_actions + a] = std::exp(row[a] - top);
      total += pi[s * num_actions + a];
    }
    for (std::size_t a = 0; a < num_actions; ++a) pi[s * num_actions + a] /= total;
  }
  return pi;
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Policy-dependent pieces shared by every reward table.
struct PolicyModel {
  Vector pi;
  Mat p_pi;
  Eigen::PartialPivLU<Mat> lu;
  Vec occupancy;
};

PolicyModel build_policy_model(const TabularCmdp& model, ConstSpan theta) {
  const std::size_t S = model.num_states;
  const std::size_t A = model.num_actions;
  PolicyModel pm;
  pm.pi = softmax_policy(theta, S, A);
  pm.p_pi = Mat::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double w = pm.pi[s * A + a];
      for (std::size_t s2 = 0; s2 < S; ++s2) pm.p_pi(s, s2) += w * model.transition(s, a, s2);
    }
  }
  const Mat system = Mat::Identity(pm.p_pi.rows(), pm.p_pi.cols()) - model.gamma * pm.p_pi;
  pm.lu.compute(system);
  const Vec start = Vec::Constant(static_cast<Eigen::Index>(S), 1.0 / static_cast<double>(S));
  pm.occupancy = (1.0 - model.gamma) * Eigen::PartialPivLU<Mat>(system.transpose()).solve(start);
  return pm;
}

PolicyEvaluation evaluate_rewards(const TabularCmdp& model, const PolicyModel& pm, ConstSpan rewards) {
  const std::size_t S = model.num_states;
  const std::size_t A = model.num_actions;
  Vec r_pi = Vec::Zero(static_cast<Eigen::Index>(S));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) r_pi(s) += pm.pi[s * A + a] * rewards[s * A + a];
  }
  const Vec v = pm.lu.solve(r_pi);

  PolicyEvaluation out;
  out.policy = pm.pi;
  out.occupancy.assign(pm.occupancy.data(), pm.occupancy.data() + S);
  out.value.assign(v.data(), v.data() + S);
  out.q.resize(S * A);
  out.gradient.resize(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      double next = 0.0;
      for (std::size_t s2 = 0; s2 < S; ++s2) next += model.transition(s, a, s2) * v(s2);
      const double q = rewards[s * A + a] + model.gamma * next;
      out.q[s * A + a] = q;
      // softmax policy gradient: d(s) pi(a|s) (Q(s, a) - V(s))
      out.gradient[s * A + a] = pm.occupancy(s) * pm.pi[s * A + a] * (q - v(s));
    }
  }
  out.normalized_return = (1.0 - model.gamma) * v.mean();
  require_finite(out.value, "cmdp: policy value");
  require_finite(out.gradient, "cmdp: policy gradient");
  return out;
}

}  // namespace

PolicyEvaluation evaluate_policy(const TabularCmdp& model, ConstSpan theta, ConstSpan rewards) {
  require_same_size(rewards.size(), model.num_states * model.num_actions, "evaluate_policy rewards");
  return evaluate_rewards(model, build_policy_model(model, theta), rewards);
}

double bellman_residual(const TabularCmdp& model, const PolicyEvaluation& eval, ConstSpan rewards) {
  const std::size_t S = model.num_states;
  const std::size_t A = model.num_actions;
  double worst = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double backup = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      double next = 0.0;
      for (std::size_t s2 = 0; s2 < S; ++s2) next += model.transition(s, a, s2) * eval.value[s2];
      backup += eval.policy[s * A + a] * (rewards[s * A + a] + model.gamma * next);
    }
    worst = std::max(worst, std::abs(eval.value[s] - backup));
  }
  return worst;
}

namespace {

// Objective and constraints share one policy solve; the last point is cached
// because the solver asks for f, grad f, g and J at the same theta.
class CmdpOracle {
 public:
  struct Result {
    Vector theta;
    PolicyEvaluation objective;
    std::vector<PolicyEvaluation> constraints;
  };

  explicit CmdpOracle(TabularCmdp model) : model_{std::move(model)} {}

  const TabularCmdp& model() const { return model_; }

  std::shared_ptr<const Result> at(ConstSpan theta) const {
    {
      std::lock_guard lock(mutex_);
      if (last_ && std::equal(theta.begin(), theta.end(), last_->theta.begin(), last_->theta.end())) {
        return last_;
      }
    }
    auto res = std::make_shared<Result>();
    res->theta.assign(theta.begin(), theta.end());
    const PolicyModel pm = build_policy_model(model_, theta);
    res->objective = evaluate_rewards(model_, pm, model_.reward);
    for (const Vector& g : model_.constraint_rewards) res->constraints.push_back(evaluate_rewards(model_, pm, g));
    std::lock_guard lock(mutex_);
    last_ = res;
    return res;
  }

 private:
  TabularCmdp model_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const Result> last_;
};

}  // namespace

ConstrainedProblem build_cmdp(const TabularCmdp& model) {
  model.validate();
  auto oracle = std::make_shared<CmdpOracle>(model);
  const std::size_t sa = model.num_states * model.num_actions;
  const std::size_t m = model.num_constraints();

  ConstrainedProblem p;
  p.name = "cmdp";
  p.dim = sa;
  p.num_constraints = m;
  p.eval_f = [oracle](ConstSpan theta) { return -oracle->at(theta)->objective.normalized_return; };
  p.eval_grad_f = [oracle](ConstSpan theta) { return scaled(-1.0, oracle->at(theta)->objective.gradient); };
  p.eval_g = [oracle](ConstSpan theta) {
    const auto res = oracle->at(theta);
    Vector g(res->constraints.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = oracle->model().thresholds[i] - res->constraints[i].normalized_return;
    }
    return g;
  };
  p.eval_jacobian = [oracle, sa](ConstSpan theta) {
    const auto res = oracle->at(theta);
    Matrix jac(res->constraints.size(), sa);
    for (std::size_t i = 0; i < res->constraints.size(); ++i) {
      const Vector& grad = res->constraints[i].gradient;
      for (std::size_t k = 0; k < sa; ++k) jac(i, k) = -grad[k];
    }
    return jac;
  };
  p.projection = ProjectionSpec::identity();
  p.validate();
  return p;
}

}  // namespace gdpa::problems
