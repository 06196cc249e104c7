#pragma once

#include <stdexcept>
#include <string>

namespace ehdg {

/// A coefficient sample violates positivity (c > 0) on some element.
class CoefficientError : public std::runtime_error {
 public:
  CoefficientError(const std::string& what, int element)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// An element-local system could not be factorized.
class SingularLocalSystem : public std::runtime_error {
 public:
  SingularLocalSystem(const std::string& what, int element)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// The global trace matrix could not be factorized.
class SingularTraceSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization was used with coefficients it was not built from.
class FingerprintMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ehdg
