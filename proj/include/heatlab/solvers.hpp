#pragma once

// Stiefel trace maximization, free/parameterized embedding fits, singular
// value thresholding and the weak-duality audit between them.

#include <iosfwd>
#include <optional>
#include <vector>

#include "heatlab/augment.hpp"
#include "heatlab/embedding.hpp"
#include "heatlab/linalg.hpp"
#include "heatlab/model.hpp"
#include "heatlab/objectives.hpp"
#include "heatlab/solver_config.hpp"

namespace heatlab {

struct StiefelResult {
  Embedding embedding;
  double objective = 0;        // tr(Z^T K Z) at the returned iterate
  double exact_objective = 0;  // sum of the top-d eigenvalues of K
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Projected gradient ascent Z <- retract(Z + eta 2 K Z). The step is capped
/// at 0.45 / |lambda_min(K)| for indefinite K so that I + 2 eta K stays
/// positive definite and the objective is monotone.
StiefelResult stiefel_trace_max(const Matrix& kernel, Index d, const SolverConfig& cfg);

struct FitResult {
  Embedding embedding;
  std::vector<double> loss_history;
  std::optional<MlpState> model;
};

/// Gradient descent on training_loss(), either over a free n x dim matrix or
/// over the outputs of an MLP on the view coordinates (`model` given, dim is
/// then the head output width).
FitResult fit_embedding(const ViewSet& views, const PartialKernel& kernel,
                        const ObjectiveSpec& objective, const SolverConfig& cfg, Index dim,
                        const std::optional<MlpConfig>& model = std::nullopt);

struct SvtOptions {
  double threshold = 0;  // tau; <= 0 selects 5 sqrt(n)
  double step = 1.2;     // eta in (0, 2]
  bool psd_projection = true;
  SolverConfig solver{.max_iters = 5000, .step = 1.2, .tolerance = 1e-6};
};

struct CompletionResult {
  Matrix X;
  int iterations = 0;
  double residual = 0;           // ||W (.) (X - H_obs)||_F
  double relative_residual = 0;  // residual / ||H_obs||_F
  double nuclear_norm = 0;
  bool converged = false;
};

/// Y <- Y + eta W (.) (H_obs - X), X <- shrink_tau(Y), started from the usual
/// k0 eta H_obs kick. Soft-thresholds the eigenvalues for symmetric input
/// (clipping negatives when psd_projection is on) and the singular values
/// otherwise.
CompletionResult svt_complete(const Matrix& observed, const Mask& mask, const SvtOptions& options = {});
CompletionResult svt_complete(const PartialKernel& kernel, const SvtOptions& options = {});

struct HadamardBound {
  double sigma1 = 0;  // sigma_1(W (.) Z Z^T)
  double sqrt_k = 0;  // sqrt of the per-row observation count
  Index k = 0;
  bool holds(double slack = 1e-12) const { return sigma1 <= sqrt_k + slack; }
};

/// Requires Z^T Z = I within 1e-8 and every row of W to hold the same count K.
HadamardBound hadamard_spectral_bound(const Mask& mask, const Matrix& z);

struct DualityReport {
  double primal = 0;  // ||X||_*
  double dual = 0;    // tr(Z^T H_obs Z) / sqrt(K)
  double gap = 0;
  double sigma1 = 0;
  double sqrt_k = 0;
  int iterations = 0;
  double residual = 0;
  bool feasible = false;
  bool weak_duality = false;  // gap >= -1e-8, meaningful only when feasible
};

/// Compares the SVT primal with a Stiefel dual point. Inputs that are not
/// feasible (Z not orthonormal, relative residual above `feasibility_tol`,
/// sigma_1 above sqrt(K)) are reported with feasible = false.
DualityReport duality_audit(const CompletionResult& primal, const Matrix& z, const Matrix& observed,
                            const Mask& mask, Index k, double feasibility_tol = 1e-6);

/// CSV with columns primal,dual,gap,sigma1,sqrtK,iters,residual.
void write_csv_header(std::ostream& out, const DualityReport*);
void write_csv_row(std::ostream& out, const DualityReport& r);
void write_csv_header(std::ostream& out, const CompletionResult*);
void write_csv_row(std::ostream& out, const CompletionResult& r);

}  // namespace heatlab
