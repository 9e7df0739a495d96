#pragma once

#include <stdexcept>
#include <string>

namespace gdpa {

/// A NaN/Inf showed up in a kernel output or callback result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested operation is not defined for this feasible-set kind.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A fit or estimate had too few usable samples.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gdpa
