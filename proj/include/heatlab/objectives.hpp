#pragma once

// Self-supervised objectives with analytic gradients.
//
// Sign conventions follow the formulas: trace_objective and infonce return
// quantities to be maximized, barlow_twins and vicreg return losses to be
// minimized. training_loss() folds all four into one minimization form.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/augment.hpp"
#include "heatlab/dataset.hpp"
#include "heatlab/linalg.hpp"

namespace heatlab {

struct LossValue {
  double value = 0;
  Matrix gradient;  // d value / d Z
  std::vector<std::pair<std::string, double>> terms;

  /// Named partial sum; throws std::out_of_range for an unknown name.
  double term(const std::string& name) const;
};

struct PairLossValue {
  double value = 0;
  Matrix gradient_a;
  Matrix gradient_b;
  std::vector<std::pair<std::string, double>> terms;
  double term(const std::string& name) const;
};

struct TracePenalties {
  double orthogonality = 1;  // rho_1 on ||Z^T Z - I||_F^2
  double mean = 1;           // rho_2 on ||Z^T 1||^2
  double column_norm = 1;    // rho_3 on sum_j (||Z^j|| - 1)^2
};

/// tr(Z^T K Z) - rho_1 ||Z^T Z - I||_F^2 - rho_2 ||Z^T 1||^2
///   - rho_3 sum_j (||Z^j||_2 - 1)^2.
/// Terms: "trace", "orthogonality", "mean", "column_norm" (unweighted).
LossValue trace_objective(const Matrix& z, const Matrix& kernel, const TracePenalties& penalties = {});

using PositivePairs = std::vector<std::pair<Index, Index>>;

struct InfoNceOptions {
  double kappa = 2.0;
  bool include_self = true;  // keep k = i in the denominator
  bool require_unit_rows = true;
};

/// l_ij = kappa <z_i, z_j> - log sum_k exp(kappa <z_i, z_k>), log-sum-exp
/// with max shift.
double infonce_term(const Matrix& z, Index i, Index j, double kappa, bool include_self);

/// L = sum over positive pairs of (l_ij + l_ji), with gradient dL/dZ.
LossValue infonce(const Matrix& z, const PositivePairs& pairs, const InfoNceOptions& options = {});

/// Entrywise log(D^{-1} A) with A_ij = exp(kappa [Z Z^T]_ij) (or the custom
/// reweighting) and D = diag(A 1).
Matrix infonce_matrix_form(const Matrix& z, double kappa,
                           const std::function<double(const Vector&, const Vector&)>& reweight = {});

/// log(M) of a matrix near the identity by the Mercator series. Throws
/// DomainError when the spectral radius of M - I is not below 1.
Matrix matrix_log_near_identity(const Matrix& m);

/// ||log(M) - (M - I)||_F for row-stochastic M near I.
double laplacian_expansion_residual(const Matrix& m);

/// Barlow Twins loss on the column-normalized cross-correlation C = A^T B:
/// sum_i (C_ii - 1)^2 + alpha sum_{i != j} C_ij^2, with gradients through
/// the normalization. Terms: "diagonal", "off_diagonal".
PairLossValue barlow_twins(const Matrix& za, const Matrix& zb, double alpha);

struct VicregWeights {
  double variance = 1;
  double covariance = 1;
  double invariance = 1;
};

/// lambda_var J_var + lambda_cov J_cov + lambda_inv J_inv on the uncentered
/// Gram Z^T Z. Terms: "variance", "covariance", "invariance" (unweighted).
LossValue vicreg(const Matrix& z, const Matrix& adjacency, const VicregWeights& weights = {});

/// All unordered same-origin pairs (i < j) of a view set.
PositivePairs positive_pairs(const ViewSet& views);

/// Row normalization y -> y / |y| and its adjoint applied to an upstream
/// gradient.
Matrix normalize_rows(const Matrix& y);
Matrix normalize_rows_backward(const Matrix& y, const Matrix& upstream);

enum class ObjectiveKind { trace, infonce, barlow_twins, vicreg };

const char* to_string(ObjectiveKind kind);
std::optional<ObjectiveKind> parse_objective_kind(const std::string& name);

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::trace;
  TracePenalties penalties;
  double kappa = 2.0;
  double alpha = 0.005;
  VicregWeights vicreg;
};

/// What each objective needs from the view protocol.
struct TrainingTargets {
  Matrix kernel;        // partial kernel, trace objective
  PositivePairs pairs;  // infonce
  std::vector<Index> rows_a, rows_b;  // matched view rows, barlow twins
  Matrix adjacency;     // view graph, vicreg
};

TrainingTargets make_targets(const ViewSet& views, const PartialKernel& kernel);

/// Minimization form of the chosen objective evaluated on raw outputs Y,
/// with the gradient with respect to Y. InfoNCE normalizes rows of Y first.
LossValue training_loss(const ObjectiveSpec& spec, const Matrix& y, const TrainingTargets& targets);

}  // namespace heatlab
