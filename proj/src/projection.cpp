#include "gdpa/projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "gdpa/simd/kernels.hpp"

namespace gdpa {

ProjectionSpec ProjectionSpec::identity() { return ProjectionSpec{Identity{}}; }

ProjectionSpec ProjectionSpec::box(Vector lower, Vector upper) {
  require_same_size(lower.size(), upper.size(), "box bounds");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("box: lower bound exceeds upper bound at index " +
                                  std::to_string(i));
    }
  }
  return ProjectionSpec{Box{std::move(lower), std::move(upper)}};
}

ProjectionSpec ProjectionSpec::ball(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball: radius must be positive and finite");
  }
  require_finite(center, "ball center");
  return ProjectionSpec{Ball{std::move(center), radius}};
}

ProjectionSpec ProjectionSpec::nonnegative_orthant() { return ProjectionSpec{NonnegativeOrthant{}}; }

ProjectionSpec ProjectionSpec::simplex_blocks(std::size_t block_size) {
  if (block_size == 0) throw std::invalid_argument("simplex: block size must be positive");
  return ProjectionSpec{SimplexBlocks{block_size}};
}

std::string_view ProjectionSpec::kind_name() const {
  switch (kind()) {
    case Kind::Identity:
      return "identity";
    case Kind::Box:
      return "box";
    case Kind::Ball:
      return "ball";
    case Kind::NonnegativeOrthant:
      return "nonnegative-orthant";
    case Kind::SimplexBlocks:
      return "simplex-blocks";
  }
  return "unknown";
}

bool ProjectionSpec::accepts_dimension(std::size_t dim) const {
  if (const auto* b = as_box()) return b->lower.size() == dim;
  if (const auto* b = as_ball()) return b->center.size() == dim;
  if (const auto* s = as_simplex()) return dim % s->block_size == 0;
  return true;
}

Vector project_simplex(ConstSpan v) {
  if (v.empty()) throw std::invalid_argument("simplex projection of an empty vector");
  Vector sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // Largest k with sorted[k-1] - (sum_{j<k} sorted[j] - 1) / k > 0. Scanning
  // every k keeps tied entries together in the support.
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    prefix += sorted[k - 1];
    const double candidate = (prefix - 1.0) / static_cast<double>(k);
    if (sorted[k - 1] - candidate > 0.0) theta = candidate;
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

Vector ProjectionSpec::project(ConstSpan v) const {
  if (!accepts_dimension(v.size())) {
    throw std::invalid_argument("project: vector of length " + std::to_string(v.size()) +
                                " does not match the " + std::string(kind_name()) + " set");
  }
  Vector out;
  switch (kind()) {
    case Kind::Identity:
      out.assign(v.begin(), v.end());
      break;
    case Kind::Box: {
      const auto& b = std::get<Box>(set_);
      out.resize(v.size());
      simd::active_kernels().clamp(v.data(), b.lower.data(), b.upper.data(), out.data(), v.size());
      break;
    }
    case Kind::Ball: {
      const auto& b = std::get<Ball>(set_);
      out = subtract(v, b.center);
      const double dist = norm2(out);
      if (dist <= b.radius) {
        out.assign(v.begin(), v.end());
      } else {
        Vector shifted = b.center;
        axpy_inplace(b.radius / dist, out, shifted);
        out = std::move(shifted);
      }
      break;
    }
    case Kind::NonnegativeOrthant:
      out = positive_part(v);
      break;
    case Kind::SimplexBlocks: {
      const std::size_t block = std::get<SimplexBlocks>(set_).block_size;
      out.resize(v.size());
      for (std::size_t start = 0; start < v.size(); start += block) {
        const Vector piece = project_simplex(v.subspan(start, block));
        std::copy(piece.begin(), piece.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
      }
      break;
    }
  }
  require_finite(out, "project");
  return out;
}

}  // namespace gdpa
