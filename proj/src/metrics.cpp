#include "gdpa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "gdpa/errors.hpp"

namespace gdpa {

double KktResidual::max() const { return std::max({stationarity, feasibility, slackness}); }

PointEvaluation PointEvaluation::at(const ConstrainedProblem& p, ConstSpan x) {
  return PointEvaluation{p.f(x), p.grad_f(x), p.g(x), p.jacobian(x)};
}

double perturbed_lagrangian(double f, ConstSpan g, ConstSpan lambda, double beta, double tau) {
  require_same_size(g.size(), lambda.size(), "perturbed_lagrangian");
  const double damp = 1.0 - tau;
  const Vector shifted = positive_part(axpy(damp / beta, lambda, g));
  return f + 0.5 * beta * norm2_sq(shifted) - damp * damp * norm2_sq(lambda) / (2.0 * beta);
}

double perturbed_lagrangian(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda, double beta,
                            double tau) {
  return perturbed_lagrangian(p.f(x), p.g(x), lambda, beta, tau);
}

StationarityMeasure stationarity_measure(const ProjectionSpec& set, const PointEvaluation& at,
                                         ConstSpan x, ConstSpan lambda, double alpha, double beta) {
  require_same_size(lambda.size(), at.g.size(), "stationarity_measure");
  Vector grad_lagrangian = at.grad_f;
  if (!lambda.empty()) axpy_inplace(1.0, transpose_times(at.jacobian, lambda), grad_lagrangian);

  StationarityMeasure out;
  out.residual.reserve(x.size() + lambda.size());
  const Vector moved = set.project(axpy(-alpha, grad_lagrangian, x));
  for (std::size_t i = 0; i < x.size(); ++i) out.residual.push_back((x[i] - moved[i]) / alpha);

  const Vector lifted = positive_part(axpy(beta, at.g, lambda));
  for (std::size_t i = 0; i < lambda.size(); ++i) out.residual.push_back((lambda[i] - lifted[i]) / beta);

  out.norm_sq = norm2_sq(out.residual);
  return out;
}

StationarityMeasure stationarity_measure(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda,
                                         double alpha, double beta) {
  return stationarity_measure(p.projection, PointEvaluation::at(p, x), x, lambda, alpha, beta);
}

double slackness(ConstSpan lambda, ConstSpan g) {
  require_same_size(lambda.size(), g.size(), "slackness");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += std::abs(lambda[i] * g[i]);
  return acc;
}

KktResidual kkt_residual(const ProjectionSpec& set, const PointEvaluation& at, ConstSpan x,
                         ConstSpan lambda, double alpha) {
  // The dual block's step does not enter the primal block, so any beta works.
  const StationarityMeasure sm = stationarity_measure(set, at, x, lambda, alpha, 1.0);
  KktResidual out;
  out.stationarity = norm2(ConstSpan{sm.residual}.first(x.size()));
  out.feasibility = norm2(positive_part(at.g));
  out.slackness = slackness(lambda, at.g);
  return out;
}

KktResidual kkt_residual(const ConstrainedProblem& p, ConstSpan x, ConstSpan lambda, double alpha) {
  return kkt_residual(p.projection, PointEvaluation::at(p, x), x, lambda, alpha);
}

Vector weighted_average(const std::vector<Vector>& iterates, const std::vector<double>& betas) {
  if (iterates.empty()) throw std::invalid_argument("weighted_average: empty trace");
  require_same_size(iterates.size(), betas.size(), "weighted_average");
  Vector acc(iterates.front().size(), 0.0);
  double weight = 0.0;
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    if (!(betas[k] > 0.0)) throw std::invalid_argument("weighted_average: beta must be positive");
    axpy_inplace(1.0 / betas[k], iterates[k], acc);
    weight += 1.0 / betas[k];
  }
  for (double& v : acc) v /= weight;
  return acc;
}

IterationRecord make_record(std::size_t r, const ProjectionSpec& set, const PointEvaluation& at,
                            ConstSpan x, ConstSpan lambda, double alpha, double beta, double gamma,
                            double tau) {
  IterationRecord rec;
  rec.r = r;
  rec.alpha = alpha;
  rec.beta = beta;
  rec.gamma = gamma;
  rec.f_value = at.f;
  rec.F_beta_value = perturbed_lagrangian(at.f, at.g, lambda, beta, tau);
  rec.stationarity_sq = stationarity_measure(set, at, x, lambda, alpha, beta).norm_sq;
  rec.feasibility = norm2(positive_part(at.g));
  rec.slackness = slackness(lambda, at.g);
  rec.lambda_norm = norm2(lambda);
  return rec;
}

std::string_view column_name(TraceColumn c) {
  switch (c) {
    case TraceColumn::StationaritySq:
      return "stationarity_sq";
    case TraceColumn::Feasibility:
      return "feasibility";
    case TraceColumn::FeasibilitySq:
      return "feasibility_sq";
    case TraceColumn::Slackness:
      return "slackness";
  }
  return "unknown";
}

double column_value(const IterationRecord& rec, TraceColumn c) {
  switch (c) {
    case TraceColumn::StationaritySq:
      return rec.stationarity_sq;
    case TraceColumn::Feasibility:
      return rec.feasibility;
    case TraceColumn::FeasibilitySq:
      return rec.feasibility * rec.feasibility;
    case TraceColumn::Slackness:
      return rec.slackness;
  }
  return 0.0;
}

RateFit fit_rate(const std::vector<IterationRecord>& trace, TraceColumn column,
                 std::pair<std::size_t, std::size_t> window) {
  std::vector<double> xs;
  std::vector<double> ys;
  double envelope = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : trace) {
    if (rec.r < window.first || rec.r > window.second) continue;
    envelope = std::min(envelope, column_value(rec, column));
    if (!(envelope > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(rec.r)));
    ys.push_back(std::log(envelope));
  }
  if (xs.size() < kMinRatePoints) {
    throw InsufficientData("fit_rate: " + std::to_string(xs.size()) + " usable records for column " +
                           std::string(column_name(column)) + " (need " +
                           std::to_string(kMinRatePoints) + ")");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("fit_rate: all usable records share one r");

  RateFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  // A constant series fits any flat line exactly; syy is only rounding noise there.
  const bool constant = std::adjacent_find(ys.begin(), ys.end(), std::not_equal_to<>()) == ys.end();
  fit.r_squared = constant || !(syy > 0.0) ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace gdpa
