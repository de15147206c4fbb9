#pragma once

#include <cstdint>
#include <random>

#include "heatlab/linalg.hpp"

namespace heatlab::testing {

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_symmetric(Index n, std::mt19937_64& rng) {
  const Matrix g = gaussian(n, n, rng);
  return (g + g.transpose()) / 2.0;
}

inline Matrix random_spd(Index n, std::mt19937_64& rng, double shift = 0.1) {
  const Matrix g = gaussian(n, n, rng);
  return g * g.transpose() / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

inline Matrix random_unit_rows(Index n, Index d, std::mt19937_64& rng) {
  return gaussian(n, d, rng).rowwise().normalized();
}

// Largest |a_ij - b_ij|.
inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace heatlab::testing
