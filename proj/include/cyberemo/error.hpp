#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cyberemo {

// Bad input: malformed files, out-of-range values, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative fit stopped without converging; carries the last iterate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : NumericalError(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

// Design matrix is rank deficient; names the terms that cannot be separated.
class IdentifiabilityError : public NumericalError {
 public:
  IdentifiabilityError(const std::string& what, std::vector<std::string> terms)
      : NumericalError(what), terms_(std::move(terms)) {}

  const std::vector<std::string>& terms() const noexcept { return terms_; }

 private:
  std::vector<std::string> terms_;
};

}  // namespace cyberemo
