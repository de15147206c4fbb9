#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "heatlab/graph.hpp"
#include "heatlab/metrics.hpp"
#include "heatlab/solvers.hpp"
#include "support.hpp"

using namespace heatlab;
using heatlab::testing::gaussian;
using heatlab::testing::max_abs_diff;

namespace {

SolverConfig ascent(int iters = 5000, double step = 1.0, double tol = 1e-12) {
  SolverConfig cfg;
  cfg.max_iters = iters;
  cfg.step = step;
  cfg.tolerance = tol;
  cfg.seed = 3;
  return cfg;
}

Matrix two_clique_adjacency(Index m) {
  Matrix a = Matrix::Zero(2 * m, 2 * m);
  a.topLeftCorner(m, m).setOnes();
  a.bottomRightCorner(m, m).setOnes();
  a.diagonal().setZero();
  return a;
}

}  // namespace

TEST(Stiefel, DiagonalKernel) {
  const Matrix k = Eigen::Vector3d(3, 2, 1).asDiagonal();
  const StiefelResult r = stiefel_trace_max(k, 2, ascent());
  EXPECT_NEAR(r.objective, 5.0, 1e-9);
  EXPECT_NEAR(r.exact_objective, 5.0, 1e-12);
  EXPECT_LT(r.embedding.Z.row(2).norm(), 1e-5);
  EXPECT_LT(r.embedding.orthogonality_residual(), 1e-8);
}

TEST(Stiefel, IsotropicKernelAnyBasisIsOptimal) {
  const StiefelResult r = stiefel_trace_max(Matrix::Identity(6, 6), 4, ascent(10));
  EXPECT_NEAR(r.objective, 4.0, 1e-12);
}

TEST(Stiefel, RandomPsdReachesEigenvalueSumMonotonically) {
  std::mt19937_64 rng(1);
  const Matrix k = heatlab::testing::random_spd(10, rng);
  for (auto retraction : {Retraction::qr, Retraction::projection}) {
    SolverConfig cfg = ascent();
    cfg.retraction = retraction;
    const StiefelResult r = stiefel_trace_max(k, 3, cfg);
    Eigen::SelfAdjointEigenSolver<Matrix> oracle(k);
    EXPECT_NEAR(r.objective, oracle.eigenvalues().tail(3).sum(), 1e-6);
    EXPECT_TRUE(r.converged);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i], r.history[i - 1] - 1e-12);
  }
}

TEST(Stiefel, IndefiniteKernelStaysMonotone) {
  std::mt19937_64 rng(2);
  const Matrix k = heatlab::testing::random_symmetric(12, rng);
  const StiefelResult r = stiefel_trace_max(k, 2, ascent(20000, 50.0));
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i], r.history[i - 1] - 1e-12);
  EXPECT_NEAR(r.objective, r.exact_objective, 1e-6);
}

TEST(Stiefel, RejectsBadInput) {
  EXPECT_THROW(stiefel_trace_max(Matrix::Zero(3, 2), 1, ascent()), DimensionError);
  Matrix a = Matrix::Identity(3, 3);
  a(0, 1) = 1;
  EXPECT_THROW(stiefel_trace_max(a, 1, ascent()), SymmetryError);
  EXPECT_THROW(stiefel_trace_max(Matrix::Identity(3, 3), 4, ascent()), PreconditionError);
}

TEST(FitEmbedding, FreeMatrixSeparatesTwoCliques) {
  const Dataset data = gen_clusters(2, {3, 3}, 2, 0.0, 1);
  const ViewSet views = gen_views(data, 1, 1, 0.0, 2);
  const Graph g(two_clique_adjacency(3));
  const PartialKernel pk = partial_kernel(heat_kernel(g, 1.0), Mask::full(6));
  ObjectiveSpec trace;
  const FitResult fit = fit_embedding(views, pk, trace, ascent(5000, 0.05, 1e-10), 1);
  const Matrix& z = fit.embedding.Z;
  for (Index i = 1; i < 3; ++i) EXPECT_GT(z(i, 0) * z(0, 0), 0.0);
  for (Index i = 3; i < 6; ++i) EXPECT_LT(z(i, 0) * z(0, 0), 0.0);
  EXPECT_FALSE(fit.model.has_value());
}

TEST(FitEmbedding, InfoNceAlignsIdenticalViews) {
  const Dataset data = gen_clusters(3, {2, 2, 2}, 3, 1.0, 3);
  const ViewSet views = gen_views(data, 2, 1, 0.0, 4);
  const PartialKernel pk = partial_kernel(heat_kernel(view_graph(views), 1.0, LaplacianKind::unnormalized),
                                          observation_mask(views));
  ObjectiveSpec spec;
  spec.kind = ObjectiveKind::infonce;
  MlpConfig lin;
  lin.encoder_widths = {3};
  lin.seed = 5;
  const FitResult fit = fit_embedding(views, pk, spec, ascent(3000, 0.1, 0), 3, lin);
  const Matrix z = normalize_rows(fit.embedding.Z);
  for (const auto& [i, j] : positive_pairs(views)) EXPECT_GT(z.row(i).dot(z.row(j)), 1 - 1e-2);
}

TEST(FitEmbedding, DivergenceIsReported) {
  const Dataset data = gen_clusters(2, {3, 3}, 2, 1.0, 1);
  const ViewSet views = gen_views(data, 2, 1, 0.1, 2);
  const PartialKernel pk = partial_kernel(heat_kernel(ideal_graph(views), 1.0), observation_mask(views));
  ObjectiveSpec trace;
  EXPECT_THROW(fit_embedding(views, pk, trace, ascent(2000, 50.0, 0), 2), DivergenceError);
}

TEST(Svt, FullyObservedKernelIsReproduced) {
  std::mt19937_64 rng(6);
  const Matrix h = heatlab::testing::random_spd(8, rng);
  SvtOptions opt;
  opt.threshold = 1e-6;
  opt.solver.max_iters = 2000;
  opt.solver.tolerance = 1e-12;
  const CompletionResult r = svt_complete(h, Mask::full(8), opt);
  EXPECT_LE((r.X - h).norm() / h.norm(), 1e-4);
  EXPECT_LT(max_abs_diff(r.X, r.X.transpose()), 1e-12);
}

TEST(Svt, RankOneFromSixtyPercentOfEntries) {
  std::mt19937_64 rng(7);
  const Vector u = gaussian(20, 1, rng).col(0).normalized();
  const Matrix m = u * u.transpose();
  const Mask mask = bernoulli_mask(20, 0.6, 8);
  SvtOptions opt;
  opt.solver.max_iters = 5000;
  opt.solver.tolerance = 1e-9;
  const CompletionResult r = svt_complete(apply_mask(m, mask), mask, opt);
  EXPECT_LE((r.X - m).norm() / m.norm(), 1e-3);
  EXPECT_LE(r.relative_residual, 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(Svt, NonSymmetricInputUsesSingularValues) {
  std::mt19937_64 rng(9);
  const Matrix m = gaussian(12, 1, rng) * gaussian(1, 12, rng);
  Matrix w = Matrix::Ones(12, 12);
  const CompletionResult r = svt_complete(m, Mask::from_indicator(w), SvtOptions{.threshold = 1e-6});
  EXPECT_LE((r.X - m).norm() / m.norm(), 1e-4);
}

TEST(Svt, RejectsBadStep) {
  SvtOptions opt;
  opt.step = 2.5;
  EXPECT_THROW(svt_complete(Matrix::Identity(3, 3), Mask::full(3), opt), PreconditionError);
}

TEST(Hadamard, DiagonalAndFullMasks) {
  std::mt19937_64 rng(10);
  const Matrix z = qr_orthonormalize(gaussian(9, 3, rng));
  const HadamardBound diag = hadamard_spectral_bound(Mask::from_groups({0, 1, 2, 3, 4, 5, 6, 7, 8}), z);
  EXPECT_NEAR(diag.sigma1, z.rowwise().squaredNorm().maxCoeff(), 1e-14);
  EXPECT_EQ(diag.sqrt_k, 1.0);
  EXPECT_TRUE(diag.holds());
  const HadamardBound full = hadamard_spectral_bound(Mask::full(9), z);
  EXPECT_NEAR(full.sigma1, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(full.sqrt_k, 3.0);
}

TEST(Hadamard, RequiresOrthonormalZAndUniformRows) {
  EXPECT_THROW(hadamard_spectral_bound(Mask::full(4), Matrix::Ones(4, 2)), PreconditionError);
  const Matrix z = Matrix::Identity(3, 1);
  EXPECT_THROW(hadamard_spectral_bound(Mask::from_groups({0, 0, 1}), z), PreconditionError);
}

TEST(Duality, FullObservationBoundsTheTrace) {
  std::mt19937_64 rng(11);
  const Index n = 6;
  const Matrix h = heatlab::testing::random_spd(n, rng);
  CompletionResult primal;
  primal.X = h;
  primal.nuclear_norm = h.trace();
  const Matrix z = sym_eig(h).eigenvectors;
  const DualityReport all = duality_audit(primal, z, h, Mask::full(n), n);
  EXPECT_TRUE(all.feasible);
  EXPECT_NEAR(all.dual, h.trace() / std::sqrt(static_cast<double>(n)), 1e-10);
  EXPECT_NEAR(all.primal, h.trace(), 1e-10);
  EXPECT_TRUE(all.weak_duality);
  // Normalizing with K = 1 removes the rescaling: sigma_1(ZZ^T) = 1 keeps the
  // full basis feasible and the dual meets the primal.
  const DualityReport unit = duality_audit(primal, z, h, Mask::full(n), 1);
  EXPECT_TRUE(unit.feasible);
  EXPECT_NEAR(unit.gap, 0.0, 1e-10);
}

TEST(Duality, InfeasiblePrimalIsLabelled) {
  const Matrix h = Matrix::Identity(4, 4);
  CompletionResult primal;
  primal.X = Matrix::Zero(4, 4);
  const DualityReport r = duality_audit(primal, Matrix::Identity(4, 1), h, Mask::full(4), 4);
  EXPECT_FALSE(r.feasible);
}

TEST(Csv, ReportRowsHaveNamedColumns) {
  std::ostringstream s;
  write_csv_header(s, static_cast<const DualityReport*>(nullptr));
  EXPECT_EQ(s.str(), "primal,dual,gap,sigma1,sqrtK,iters,residual\n");
  std::ostringstream c;
  write_csv_header(c, static_cast<const CompletionResult*>(nullptr));
  EXPECT_EQ(c.str(), "nuclear,iters,residual,relative\n");
}
