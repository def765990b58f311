#pragma once

#include <stdexcept>
#include <string>

namespace vrjp {

/// Caller violated a documented precondition (bad sizes, out-of-range ids,
/// weights that break a model hypothesis, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Cholesky/LU factorization failed where the input was required to be
/// positive definite. Usually a disconnected graph or overflow in e^{u}.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured size limit (matrix dimension, enumeration size, memory) was hit.
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vrjp
