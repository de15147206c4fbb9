#pragma once

// Central finite-difference checks of the analytic gradients.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "heatlab/linalg.hpp"

namespace heatlab {

/// Central differences of f at x with step h, one coordinate at a time.
Matrix numerical_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-5);

/// ||a - b||_F / max(||a||_F, ||b||_F, floor).
double relative_error(const Matrix& analytic, const Matrix& numeric, double floor = 1e-8);

struct GradientCheck {
  std::string name;
  int points = 0;
  double max_relative_error = 0;
  double tolerance = 0;
  bool passed() const { return max_relative_error < tolerance; }
};

/// Checks trace, InfoNCE, Barlow Twins (both inputs), VICReg and MLP
/// backprop gradients at `points` random points each.
std::vector<GradientCheck> gradient_suite(int points, std::uint64_t seed);

}  // namespace heatlab
