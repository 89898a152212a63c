#pragma once

#include <stdexcept>
#include <string>

namespace cdbn {

// Malformed or inconsistent input files / configuration (CLI exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: rank-deficient designs, nonpositive quadratic forms,
// degenerate test statistics (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Xγ lost full column rank after augmentation/orthogonalization.
class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(std::string column, const std::string& what)
      : NumericalError(what), column_(std::move(column)) {}

  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

}  // namespace cdbn
