#pragma once

#include <stdexcept>
#include <string>

namespace stellar {

/// Numerical failure: quadrature breakdown, step-size underflow, lost bracket.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative scheme exhausted its budget without meeting its tolerance.
class convergence_error : public numeric_error {
 public:
  explicit convergence_error(const std::string& what) : numeric_error(what) {}
};

}  // namespace stellar
