#pragma once

#include <stdexcept>
#include <string>

namespace iocforge {

// A documented precondition was broken by the caller (bad dimensions,
// non-finite entries, asymmetric input, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The data does not pin the weight matrices to a single ray.
class UnidentifiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A weight ray was found but neither sign gives Q >= 0 and R > 0.
class InconsistentDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An initial trajectory cannot be represented by the offline data.
class ResidualTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The smallest eigenvalue is not numerically simple, so the first-order
// eigenvector expansion is undefined.
class GapTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iocforge
