#include "heatlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"

namespace heatlab {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = noise(rng);
  return m;
}

Matrix retract(const Matrix& z, Retraction kind) {
  return kind == Retraction::qr ? qr_orthonormalize(z) : polar_orthonormalize(z);
}

// Eigendecomposition of a symmetric matrix, started in a basis that nearly
// diagonalizes it. Jacobi then needs only a sweep or two.
Spectrum<double> warm_sym_eig(const Matrix& y, const Matrix& basis) {
  if (basis.rows() != y.rows()) return sym_eig(y);
  Matrix rotated = basis.transpose() * y * basis;
  rotated = (rotated + rotated.transpose()).eval() / 2.0;
  auto inner = sym_eig(rotated);
  inner.eigenvectors = basis * inner.eigenvectors;
  return inner;
}

}  // namespace

StiefelResult stiefel_trace_max(const Matrix& kernel, Index d, const SolverConfig& cfg) {
  const Index n = kernel.rows();
  if (kernel.cols() != n) throw DimensionError("stiefel_trace_max: kernel must be square");
  if (!is_symmetric(kernel)) throw SymmetryError("stiefel_trace_max: kernel must be symmetric");
  if (d < 1 || d > n) throw PreconditionError("stiefel_trace_max: need 1 <= d <= n");
  if (!(cfg.step > 0)) throw PreconditionError("stiefel_trace_max: step must be positive");

  const Matrix k = (kernel + kernel.transpose()) / 2.0;
  const auto eig = sym_eig(k);
  StiefelResult out;
  out.exact_objective = eig.eigenvalues.tail(d).sum();
  const double lambda_min = eig.eigenvalues(0);
  const double scale = std::max(1.0, k.norm());

  Matrix z = retract(gaussian_matrix(n, d, cfg.seed, 1.0), cfg.retraction);
  auto objective = [&](const Matrix& q) { return q.cwiseProduct(k * q).sum(); };
  double value = objective(z);
  out.history.push_back(value);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Matrix kz = k * z;
    const Matrix residual = kz - z * (z.transpose() * kz);
    if (residual.norm() <= cfg.tolerance * scale) {
      out.converged = true;
      break;
    }
    double eta = scheduled_step(cfg, iter);
    if (lambda_min < 0) eta = std::min(eta, 0.45 / -lambda_min);
    z = retract(z + 2.0 * eta * kz, cfg.retraction);
    value = objective(z);
    out.history.push_back(value);
    out.iterations = iter + 1;
  }
  out.objective = value;
  out.embedding = Embedding(std::move(z));
  return out;
}

FitResult fit_embedding(const ViewSet& views, const PartialKernel& kernel, const ObjectiveSpec& objective,
                        const SolverConfig& cfg, Index dim, const std::optional<MlpConfig>& model) {
  const TrainingTargets targets = make_targets(views, kernel);
  FitResult out;
  if (model) {
    MlpConfig mc = *model;
    MlpState init = mlp_init(mc, views.views.cols());
    MlpTrainResult trained = mlp_train(std::move(init), views.views, objective, targets, cfg);
    out.embedding = Embedding(mlp_embed(trained.state, views.views).embeddings);
    out.loss_history = std::move(trained.loss_history);
    out.model = std::move(trained.state);
    return out;
  }

  const Index n = views.size();
  if (dim < 1 || dim > n) throw PreconditionError("fit_embedding: need 1 <= dim <= n");
  Matrix z = gaussian_matrix(n, dim, cfg.seed, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    const LossValue loss = training_loss(objective, z, targets);
    if (!std::isfinite(loss.value) || !loss.gradient.allFinite())
      throw DivergenceError("fit_embedding: loss became non-finite at iteration " + std::to_string(iter), iter);
    out.loss_history.push_back(loss.value);
    if (iter == cfg.max_iters || loss.gradient.norm() <= cfg.tolerance) break;
    z -= scheduled_step(cfg, iter) * loss.gradient;
  }
  out.embedding = Embedding(std::move(z));
  return out;
}

CompletionResult svt_complete(const Matrix& observed, const Mask& mask, const SvtOptions& options) {
  const Index n = observed.rows();
  if (observed.cols() != n) throw DimensionError("svt_complete: observed kernel must be square");
  if (mask.size() != n) throw DimensionError("svt_complete: mask size does not match");
  if (!(options.step > 0 && options.step <= 2)) throw PreconditionError("svt_complete: need 0 < eta <= 2");
  const double tau = options.threshold > 0 ? options.threshold : 5.0 * std::sqrt(static_cast<double>(n));
  const double eta = options.step;
  const bool symmetric = is_symmetric(observed);

  const Matrix target = apply_mask(observed, mask);
  const Matrix w = mask.indicator();
  const double target_norm = target.norm();

  CompletionResult out;
  out.X = Matrix::Zero(n, n);
  if (target_norm == 0.0) {
    out.converged = true;
    return out;
  }

  const double kick = std::ceil(tau / (eta * norm(target, NormKind::spectral)));
  Matrix y = kick * eta * target;
  Matrix basis;

  auto shrink = [&](const Matrix& m) -> Matrix {
    if (symmetric) {
      const auto eig = warm_sym_eig(m, basis);
      basis = eig.eigenvectors;
      Vector s = eig.eigenvalues;
      for (Index i = 0; i < s.size(); ++i) {
        const double mag = std::max(std::abs(s(i)) - tau, 0.0);
        s(i) = options.psd_projection ? std::max(s(i) - tau, 0.0) : std::copysign(mag, s(i));
      }
      Matrix x = eig.eigenvectors * s.asDiagonal() * eig.eigenvectors.transpose();
      return (x + x.transpose()) / 2.0;
    }
    const auto dec = svd(m);
    const Vector s = (dec.singular_values.array() - tau).max(0.0);
    return dec.U * s.asDiagonal() * dec.V.transpose();
  };

  const int max_iters = options.solver.max_iters;
  for (int iter = 0; iter < max_iters; ++iter) {
    out.X = shrink(y);
    const Matrix r = w.cwiseProduct(target - out.X);
    out.residual = r.norm();
    out.relative_residual = out.residual / target_norm;
    out.iterations = iter + 1;
    if (!std::isfinite(out.residual))
      throw DivergenceError("svt_complete: residual became non-finite", iter);
    if (out.relative_residual <= options.solver.tolerance) {
      out.converged = true;
      break;
    }
    y += eta * r;
  }
  out.nuclear_norm = norm(out.X, NormKind::nuclear);
  return out;
}

CompletionResult svt_complete(const PartialKernel& kernel, const SvtOptions& options) {
  return svt_complete(kernel.observed, kernel.mask, options);
}

HadamardBound hadamard_spectral_bound(const Mask& mask, const Matrix& z) {
  const Index n = z.rows();
  if (mask.size() != n) throw DimensionError("hadamard_spectral_bound: mask and Z disagree in size");
  if ((z.transpose() * z - Matrix::Identity(z.cols(), z.cols())).norm() > 1e-8)
    throw PreconditionError("hadamard_spectral_bound: Z must have orthonormal columns");
  const auto counts = mask.row_counts();
  if (counts.empty() || std::any_of(counts.begin(), counts.end(), [&](Index c) { return c != counts.front(); }))
    throw PreconditionError("hadamard_spectral_bound: every mask row must hold the same count");

  HadamardBound out;
  out.k = counts.front();
  out.sqrt_k = std::sqrt(static_cast<double>(out.k));
  out.sigma1 = norm(apply_mask(z * z.transpose(), mask), NormKind::spectral);
  return out;
}

DualityReport duality_audit(const CompletionResult& primal, const Matrix& z, const Matrix& observed,
                            const Mask& mask, Index k, double feasibility_tol) {
  const Index n = observed.rows();
  if (z.rows() != n || mask.size() != n || primal.X.rows() != n)
    throw DimensionError("duality_audit: sizes disagree");
  if (k < 1) throw PreconditionError("duality_audit: K must be positive");

  DualityReport r;
  const Matrix target = apply_mask(observed, mask);
  r.primal = norm(primal.X, NormKind::nuclear);
  r.sqrt_k = std::sqrt(static_cast<double>(k));
  r.dual = z.cwiseProduct(target * z).sum() / r.sqrt_k;
  r.gap = r.primal - r.dual;
  r.sigma1 = norm(apply_mask(z * z.transpose(), mask), NormKind::spectral);
  r.iterations = primal.iterations;
  r.residual = primal.residual;

  const bool stiefel = (z.transpose() * z - Matrix::Identity(z.cols(), z.cols())).norm() <= 1e-8;
  const double target_norm = target.norm();
  const double relative = target_norm > 0 ? apply_mask(primal.X - target, mask).norm() / target_norm : 0.0;
  r.feasible = stiefel && relative <= feasibility_tol && r.sigma1 <= r.sqrt_k + 1e-12;
  r.weak_duality = r.gap >= -1e-8;
  return r;
}

void write_csv_header(std::ostream& out, const DualityReport*) {
  out << "primal,dual,gap,sigma1,sqrtK,iters,residual\n";
}

void write_csv_row(std::ostream& out, const DualityReport& r) {
  out << csv::number(r.primal) << ',' << csv::number(r.dual) << ',' << csv::number(r.gap) << ','
      << csv::number(r.sigma1) << ',' << csv::number(r.sqrt_k) << ',' << r.iterations << ','
      << csv::number(r.residual) << '\n';
}

void write_csv_header(std::ostream& out, const CompletionResult*) { out << "nuclear,iters,residual,relative\n"; }

void write_csv_row(std::ostream& out, const CompletionResult& r) {
  out << csv::number(r.nuclear_norm) << ',' << r.iterations << ',' << csv::number(r.residual) << ','
      << csv::number(r.relative_residual) << '\n';
}

}  // namespace heatlab
