#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heatlab/linalg.hpp"

namespace heatlab {

/// An n x d embedding matrix together with the constraint residuals of the
/// trace objective. Residuals are always recomputed from Z.
struct Embedding {
  Matrix Z;
  std::vector<std::string> warnings;

  Embedding() = default;
  explicit Embedding(Matrix z) : Z(std::move(z)) {}

  Index rows() const { return Z.rows(); }
  Index dim() const { return Z.cols(); }

  /// ||Z^T Z - I||_F
  double orthogonality_residual() const {
    return (Z.transpose() * Z - Matrix::Identity(Z.cols(), Z.cols())).norm();
  }
  /// ||Z^T 1||_2
  double mean_residual() const { return Z.colwise().sum().norm(); }
  Vector column_norms() const { return Z.colwise().norm().transpose(); }
};

}  // namespace heatlab
