#pragma once

// Dense symmetric eigendecomposition (cyclic Jacobi), SVD through the Gram
// matrix, spectral matrix functions and the three matrix norms.
//
// Everything here is a pure function of its arguments and is templated on the
// scalar type of the Eigen expression it receives.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "heatlab/errors.hpp"

namespace heatlab {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
template <typename Scalar>
struct Spectrum {
  VectorX<Scalar> eigenvalues;
  MatrixX<Scalar> eigenvectors;
};

/// Thin SVD: M = U diag(singular_values) V^T with singular values descending.
template <typename Scalar>
struct SvdResult {
  MatrixX<Scalar> U;
  VectorX<Scalar> singular_values;
  MatrixX<Scalar> V;
};

enum class NormKind { frobenius, spectral, nuclear };

struct JacobiOptions {
  int max_sweeps = 100;
  double relative_tolerance = 1e-12;
};

namespace detail {

// Flip each column so that its first coordinate above `threshold` in
// magnitude is positive.
template <typename Scalar>
void canonicalize_signs(MatrixX<Scalar>& vectors, Scalar threshold = Scalar(1e-10)) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    for (Index i = 0; i < vectors.rows(); ++i) {
      const Scalar v = vectors(i, j);
      if (std::abs(v) > threshold) {
        if (v < Scalar(0)) vectors.col(j) = -vectors.col(j);
        break;
      }
    }
  }
}

template <typename Scalar>
Scalar off_diagonal_norm(const MatrixX<Scalar>& a) {
  Scalar sum = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace detail

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, double relative_tolerance = 1e-12) {
  if (m.rows() != m.cols()) return false;
  using Scalar = typename Derived::Scalar;
  const Scalar scale = std::max<Scalar>(m.norm(), std::numeric_limits<Scalar>::min());
  return (m - m.transpose()).norm() <= Scalar(relative_tolerance) * scale;
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input must be square and symmetric to 1e-12 relative Frobenius error.
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `relative_tolerance * ||M||_F`; exceeding `max_sweeps` throws
/// ConvergenceError. Eigenvalues come back ascending and each eigenvector has
/// its first non-negligible coordinate positive.
template <typename Derived>
Spectrum<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& m,
                                           const JacobiOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols())
    throw DimensionError("sym_eig: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  if (!m.allFinite()) throw DomainError("sym_eig: non-finite entries");
  if (!is_symmetric(m)) throw SymmetryError("sym_eig: matrix is not symmetric");

  const Index n = m.rows();
  MatrixX<Scalar> a = (m + m.transpose()) / Scalar(2);
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
  const Scalar tolerance = Scalar(options.relative_tolerance) * a.norm();

  bool converged = false;
  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= tolerance) {
      converged = true;
      break;
    }
    if (sweep == options.max_sweeps) break;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        Scalar t;
        if (std::abs(theta) > Scalar(1e150)) {
          t = Scalar(1) / (Scalar(2) * theta);
        } else {
          t = Scalar(1) / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
          if (theta < Scalar(0)) t = -t;
        }
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;

        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Scalar arp = a(r, p);
          const Scalar arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
          a(p, r) = a(r, p);
          a(q, r) = a(r, q);
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);

        for (Index r = 0; r < n; ++r) {
          const Scalar vrp = v(r, p);
          const Scalar vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged)
    throw ConvergenceError("sym_eig: Jacobi did not converge in " +
                           std::to_string(options.max_sweeps) + " sweeps");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) < a(j, j); });

  Spectrum<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  detail::canonicalize_signs(out.eigenvectors);
  return out;
}

namespace detail {

// Modified Gram-Schmidt (two passes) of `column` against the first `count`
// columns of `basis`. Returns the residual norm before normalization.
template <typename Scalar>
Scalar orthogonalize_against(const MatrixX<Scalar>& basis, Index count, VectorX<Scalar>& column) {
  for (int pass = 0; pass < 2; ++pass)
    for (Index k = 0; k < count; ++k) column -= basis.col(k).dot(column) * basis.col(k);
  return column.norm();
}

template <typename Scalar>
SvdResult<Scalar> svd_tall(const MatrixX<Scalar>& m, const JacobiOptions& options) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  MatrixX<Scalar> gram = m.transpose() * m;
  gram = (gram + gram.transpose()).eval() / Scalar(2);
  const Spectrum<Scalar> eig = sym_eig(gram, options);

  // Gram eigenvalues squared the singular values; recover sigma from |M v|
  // directly so tiny singular values do not collapse to sqrt(eps) noise.
  MatrixX<Scalar> v = eig.eigenvectors.rowwise().reverse();
  MatrixX<Scalar> mv = m * v;
  VectorX<Scalar> sigma = mv.colwise().norm().transpose();

  std::vector<Index> order(static_cast<std::size_t>(cols));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return sigma(i) > sigma(j); });

  SvdResult<Scalar> out;
  out.U.resize(rows, cols);
  out.V.resize(cols, cols);
  out.singular_values.resize(cols);
  for (Index k = 0; k < cols; ++k) {
    out.V.col(k) = v.col(order[k]);
    out.singular_values(k) = sigma(order[k]);
  }

  const Scalar floor = std::numeric_limits<Scalar>::min() * Scalar(1e10);
  Index next_basis = 0;
  for (Index k = 0; k < cols; ++k) {
    VectorX<Scalar> u;
    Scalar residual = 0;
    if (out.singular_values(k) > floor) {
      u = mv.col(order[k]) / out.singular_values(k);
      residual = orthogonalize_against(out.U, k, u);
    }
    // Null directions: complete with standard basis vectors.
    while (residual < Scalar(1e-3)) {
      if (next_basis >= rows) throw ConvergenceError("svd: failed to complete the left basis");
      u = VectorX<Scalar>::Unit(rows, next_basis++);
      residual = orthogonalize_against(out.U, k, u);
    }
    out.U.col(k) = u / residual;
  }
  return out;
}

}  // namespace detail

/// Thin SVD through the eigendecomposition of the Gram matrix.
///
/// Right vectors are Gram eigenvectors (sign convention of sym_eig), left
/// vectors are M v / sigma re-orthonormalized in descending-sigma order.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m,
                                        const JacobiOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  if (!m.allFinite()) throw DomainError("svd: non-finite entries");
  if (m.rows() >= m.cols()) return detail::svd_tall<Scalar>(m.eval(), options);
  SvdResult<Scalar> t = detail::svd_tall<Scalar>(m.transpose().eval(), options);
  std::swap(t.U, t.V);
  return t;
}

/// U f(Lambda) U^T for symmetric M. Throws DomainError when f produces a
/// non-finite value on some eigenvalue.
template <typename Derived, typename Function>
MatrixX<typename Derived::Scalar> func_sym(const Eigen::MatrixBase<Derived>& m, Function&& f) {
  using Scalar = typename Derived::Scalar;
  const Spectrum<Scalar> eig = sym_eig(m);
  VectorX<Scalar> mapped(eig.eigenvalues.size());
  for (Index k = 0; k < mapped.size(); ++k) {
    mapped(k) = static_cast<Scalar>(f(eig.eigenvalues(k)));
    if (!std::isfinite(mapped(k)))
      throw DomainError("func_sym: function undefined at eigenvalue " +
                        std::to_string(static_cast<double>(eig.eigenvalues(k))));
  }
  MatrixX<Scalar> out = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
  return (out + out.transpose()) / Scalar(2);
}

/// exp(-t M) for symmetric M.
template <typename Derived>
MatrixX<typename Derived::Scalar> exp_neg_sym(const Eigen::MatrixBase<Derived>& m,
                                              typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  return func_sym(m, [t](Scalar x) { return std::exp(-t * x); });
}

/// Principal logarithm of a symmetric positive definite matrix.
template <typename Derived>
MatrixX<typename Derived::Scalar> log_sym(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return func_sym(m, [](Scalar x) {
    if (!(x > Scalar(0))) return std::numeric_limits<Scalar>::quiet_NaN();
    return std::log(x);
  });
}

template <typename Derived>
typename Derived::Scalar norm(const Eigen::MatrixBase<Derived>& m, NormKind kind) {
  using Scalar = typename Derived::Scalar;
  switch (kind) {
    case NormKind::frobenius:
      return m.norm();
    case NormKind::spectral: {
      if (m.size() == 0) return Scalar(0);
      return svd(m).singular_values(0);
    }
    case NormKind::nuclear:
      if (m.size() == 0) return Scalar(0);
      return svd(m).singular_values.sum();
  }
  return Scalar(0);
}

/// Orthonormal basis of the column space of a full-column-rank matrix via
/// Householder QR, with R's diagonal made nonnegative so the result is unique.
template <typename Derived>
MatrixX<typename Derived::Scalar> qr_orthonormalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(m.eval());
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(m.rows(), m.cols());
  const MatrixX<Scalar>& r = qr.matrixQR();
  for (Index j = 0; j < m.cols(); ++j)
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  return q;
}

/// Closest matrix with orthonormal columns, M (M^T M)^{-1/2}.
template <typename Derived>
MatrixX<typename Derived::Scalar> polar_orthonormalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> gram = m.transpose() * m;
  const MatrixX<Scalar> inv_sqrt = func_sym(gram, [](Scalar x) {
    if (!(x > Scalar(0))) return std::numeric_limits<Scalar>::quiet_NaN();
    return Scalar(1) / std::sqrt(x);
  });
  return m * inv_sqrt;
}

}  // namespace heatlab
