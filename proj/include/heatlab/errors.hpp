#pragma once

#include <stdexcept>
#include <string>

namespace heatlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or size mismatch between arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (log of a nonpositive eigenvalue,
// spectral radius too large for a series, zero column in a normalization).
class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Zero-degree node fed to a normalized Laplacian.
class DegenerateDegreeError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, long numerical_rank)
      : Error(what), numerical_rank_(numerical_rank) {}
  long numerical_rank() const noexcept { return numerical_rank_; }

 private:
  long numerical_rank_;
};

// Loss became non-finite during training.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long iteration)
      : Error(what), iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace heatlab
