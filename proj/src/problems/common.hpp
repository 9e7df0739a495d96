#pragma once

#include <cmath>

namespace gdpa::problems::detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace gdpa::problems::detail
