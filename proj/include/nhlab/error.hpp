#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace nhlab {

/// Bad input: malformed family, parameters out of range, inconsistent index sets.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gram matrix too close to singular to invert; carries the offending eigenvalue.
class NearSingularError : public NumericalError {
 public:
  NearSingularError(double min_eigenvalue, double norm)
      : NumericalError(describe(min_eigenvalue, norm)),
        min_eigenvalue_(min_eigenvalue),
        norm_(norm) {}

  double min_eigenvalue() const { return min_eigenvalue_; }
  double norm() const { return norm_; }

 private:
  static std::string describe(double min_eigenvalue, double norm) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "near-singular Gram matrix: min eigenvalue %.3e against norm %.3e", min_eigenvalue,
                  norm);
    return buf;
  }

  double min_eigenvalue_;
  double norm_;
};

}  // namespace nhlab
