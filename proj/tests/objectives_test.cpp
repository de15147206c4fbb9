#include <gtest/gtest.h>

#include <cmath>

#include "heatlab/gradcheck.hpp"
#include "heatlab/graph.hpp"
#include "heatlab/objectives.hpp"
#include "support.hpp"

using namespace heatlab;
using heatlab::testing::gaussian;
using heatlab::testing::max_abs_diff;
using heatlab::testing::random_unit_rows;

namespace {

const TracePenalties kNoPenalties{0, 0, 0};

// Row-stochastic matrix with positive entries.
Matrix random_stochastic(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Matrix p(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) p(i, j) = u(rng);
  return p.array().colwise() / p.rowwise().sum().array();
}

}  // namespace

TEST(TraceObjective, EigenvectorsReachTopEigenvalueSum) {
  std::mt19937_64 rng(1);
  const Matrix k = heatlab::testing::random_spd(7, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> oracle(k);
  const Matrix z = oracle.eigenvectors().rightCols(3);
  const LossValue v = trace_objective(z, k, kNoPenalties);
  EXPECT_NEAR(v.value, oracle.eigenvalues().tail(3).sum(), 1e-10);
  EXPECT_NEAR(v.term("trace"), v.value, 1e-12);
}

TEST(TraceObjective, ZeroEmbeddingHasZeroTraceAndGradient) {
  const Matrix k = Matrix::Identity(5, 5);
  const LossValue v = trace_objective(Matrix::Zero(5, 2), k, kNoPenalties);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.gradient.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TraceObjective, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(2);
  const Matrix k = heatlab::testing::random_symmetric(8, rng);
  const TracePenalties pen{0.7, 1.3, 0.9};
  const Matrix z = gaussian(8, 2, rng);
  const Matrix numeric = numerical_gradient([&](const Matrix& x) { return trace_objective(x, k, pen).value; }, z);
  EXPECT_LT(relative_error(trace_objective(z, k, pen).gradient, numeric), 1e-6);
}

TEST(TraceObjective, RotationInvariantWithoutPenalties) {
  std::mt19937_64 rng(3);
  const Matrix k = heatlab::testing::random_symmetric(9, rng);
  const Matrix z = gaussian(9, 3, rng);
  const Matrix q = qr_orthonormalize(gaussian(3, 3, rng));
  EXPECT_NEAR(trace_objective(z, k, kNoPenalties).value, trace_objective(z * q, k, kNoPenalties).value, 1e-10);
}

TEST(TraceObjective, TermsAreUnweightedResiduals) {
  std::mt19937_64 rng(4);
  const Matrix z = gaussian(6, 2, rng);
  const LossValue v = trace_objective(z, Matrix::Identity(6, 6), {2, 3, 5});
  const Embedding e(z);
  EXPECT_NEAR(v.term("orthogonality"), std::pow(e.orthogonality_residual(), 2), 1e-12);
  EXPECT_NEAR(v.term("mean"), std::pow(e.mean_residual(), 2), 1e-12);
  EXPECT_THROW(v.term("nope"), std::out_of_range);
  EXPECT_THROW(trace_objective(z, Matrix::Identity(5, 5)), DimensionError);
}

TEST(InfoNce, IdenticalPairGivesMinusLogTwo) {
  Matrix z(2, 2);
  z << 1, 0, 1, 0;
  EXPECT_NEAR(infonce_term(z, 0, 1, 2.0, true), -std::log(2.0), 1e-15);
  const LossValue v = infonce(z, {{0, 1}});
  EXPECT_NEAR(v.value, -2 * std::log(2.0), 1e-15);
}

TEST(InfoNce, MatrixFormUsesExpKappaWeights) {
  Matrix z(2, 1);
  z << 1, 1;
  // A = e^2 everywhere, so D^{-1} A = 1/2 and the log is -log 2.
  const Matrix l = infonce_matrix_form(z, 2.0);
  EXPECT_NEAR(l(0, 1), -std::log(2.0), 1e-15);
  const Matrix custom =
      infonce_matrix_form(z, 2.0, [](const Vector& a, const Vector& b) { return std::exp(2.0 * a.dot(b)); });
  EXPECT_LT(max_abs_diff(custom, l), 1e-15);
}

TEST(InfoNce, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  const Matrix z = random_unit_rows(6, 2, rng);
  const PositivePairs pairs{{0, 1}, {2, 3}, {4, 5}};
  InfoNceOptions opt;
  opt.require_unit_rows = false;
  const Matrix numeric = numerical_gradient([&](const Matrix& x) { return infonce(x, pairs, opt).value; }, z);
  EXPECT_LT(relative_error(infonce(z, pairs).gradient, numeric), 1e-5);
}

TEST(InfoNce, RejectsNonUnitRows) {
  const Matrix z = Matrix::Ones(3, 2);
  EXPECT_THROW(infonce(z, {{0, 1}}), PreconditionError);
  EXPECT_THROW(infonce_matrix_form(z, 2.0), PreconditionError);
}

TEST(InfoNce, MatrixFormRowsNormalizeAndMatchNaiveSummation) {
  std::mt19937_64 rng(6);
  const Matrix z = random_unit_rows(5, 3, rng);
  const double kappa = 2.0;
  const Matrix l = infonce_matrix_form(z, kappa);
  EXPECT_LT((l.array().exp().rowwise().sum() - 1.0).abs().maxCoeff(), 1e-12);
  for (Index i = 0; i < 5; ++i) {
    double denom = 0;
    for (Index k = 0; k < 5; ++k) denom += std::exp(kappa * z.row(i).dot(z.row(k)));
    for (Index j = 0; j < 5; ++j) EXPECT_NEAR(l(i, j), std::log(std::exp(kappa * z.row(i).dot(z.row(j))) / denom), 1e-12);
  }
}

TEST(InfoNce, ExcludingSelfChangesTheDenominator) {
  std::mt19937_64 rng(7);
  const Matrix z = random_unit_rows(4, 2, rng);
  double denom = 0;
  for (Index k = 1; k < 4; ++k) denom += std::exp(2.0 * z.row(0).dot(z.row(k)));
  EXPECT_NEAR(infonce_term(z, 0, 1, 2.0, false), 2.0 * z.row(0).dot(z.row(1)) - std::log(denom), 1e-12);
}

TEST(MatrixLog, AgreesWithSymmetricLogarithm) {
  std::mt19937_64 rng(8);
  Matrix s = heatlab::testing::random_symmetric(5, rng);
  s *= 0.3 / sym_eig(s).eigenvalues.cwiseAbs().maxCoeff();
  const Matrix m = Matrix::Identity(5, 5) + s;
  EXPECT_LT(max_abs_diff(matrix_log_near_identity(m), log_sym(m)), 1e-12);
  EXPECT_THROW(matrix_log_near_identity(3.0 * Matrix::Identity(2, 2)), DomainError);
}

TEST(ExpansionResidual, SecondOrderDecay) {
  EXPECT_EQ(laplacian_expansion_residual(Matrix::Identity(4, 4)), 0.0);
  std::mt19937_64 rng(9);
  const Matrix e = random_stochastic(6, rng) - Matrix::Identity(6, 6);
  // Leading term of log(I + eps E) - eps E is -eps^2 E^2 / 2.
  const double c = (e * e).norm() / 2;
  double previous = 0;
  for (double eps : {1e-2, 5e-3, 2.5e-3, 1e-3}) {
    const double r = laplacian_expansion_residual(Matrix::Identity(6, 6) + eps * e);
    EXPECT_NEAR(r, c * eps * eps, 0.05 * c * eps * eps);
    if (previous > 0) EXPECT_LE(r / previous, 0.3);
    previous = r;
  }
  EXPECT_THROW(laplacian_expansion_residual(Matrix::Ones(2, 2)), PreconditionError);
}

TEST(BarlowTwins, PerfectAndOrthogonalCases) {
  std::mt19937_64 rng(10);
  const Matrix q = qr_orthonormalize(gaussian(6, 3, rng));
  EXPECT_NEAR(barlow_twins(q, q, 0.005).value, 0.0, 1e-14);
  Matrix a(2, 1), b(2, 1);
  a << 1, 0;
  b << 0, 1;
  EXPECT_NEAR(barlow_twins(a, b, 0.005).value, 1.0, 1e-15);
  EXPECT_THROW(barlow_twins(Matrix::Zero(3, 2), q.topRows(3).leftCols(2), 0.1), DomainError);
}

TEST(BarlowTwins, NonnegativeAndZeroOnlyForIdentityCorrelation) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = gaussian(7, 3, rng);
    const Matrix b = gaussian(7, 3, rng);
    EXPECT_GT(barlow_twins(a, b, 0.1).value, 0.0);
  }
  // Scaling columns does not matter after normalization.
  const Matrix q = qr_orthonormalize(gaussian(7, 3, rng));
  const Matrix scaled = q * Vector(Eigen::Vector3d(2, 5, 0.5)).asDiagonal();
  EXPECT_NEAR(barlow_twins(q, scaled, 0.1).value, 0.0, 1e-14);
}

TEST(BarlowTwins, GradientsMatchCentralDifferences) {
  std::mt19937_64 rng(12);
  const Matrix a = gaussian(6, 3, rng);
  const Matrix b = gaussian(6, 3, rng);
  const PairLossValue v = barlow_twins(a, b, 0.005);
  EXPECT_LT(relative_error(v.gradient_a, numerical_gradient([&](const Matrix& x) { return barlow_twins(x, b, 0.005).value; }, a)), 1e-5);
  EXPECT_LT(relative_error(v.gradient_b, numerical_gradient([&](const Matrix& x) { return barlow_twins(a, x, 0.005).value; }, b)), 1e-5);
}

TEST(Vicreg, VanishingTermsAndHingeAtZero) {
  Matrix z = Matrix::Zero(4, 2);
  z(0, 0) = z(1, 0) = std::sqrt(0.5);
  z(2, 1) = z(3, 1) = std::sqrt(0.5);
  Matrix a = Matrix::Zero(4, 4);
  a(0, 1) = a(1, 0) = a(2, 3) = a(3, 2) = 1;
  const LossValue v = vicreg(z, a);
  EXPECT_NEAR(v.term("variance"), 0.0, 1e-15);
  EXPECT_NEAR(v.term("covariance"), 0.0, 1e-15);
  EXPECT_NEAR(v.term("invariance"), 0.0, 1e-15);
  EXPECT_NEAR(vicreg(Matrix::Zero(4, 2), a).term("variance"), 2.0, 1e-15);
}

TEST(Vicreg, GradientMatchesCentralDifferencesAwayFromKinks) {
  std::mt19937_64 rng(13);
  Matrix a = Matrix::Zero(8, 8);
  for (Index b = 0; b < 4; ++b) a(2 * b, 2 * b + 1) = a(2 * b + 1, 2 * b) = 1;
  const VicregWeights w{1, 0.5, 0.25};
  const Matrix z = 0.3 * gaussian(8, 3, rng);
  const Matrix numeric = numerical_gradient([&](const Matrix& x) { return vicreg(x, a, w).value; }, z);
  EXPECT_LT(relative_error(vicreg(z, a, w).gradient, numeric), 1e-5);
}

TEST(Vicreg, RejectsBadAdjacency) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = 1;
  EXPECT_THROW(vicreg(Matrix::Ones(3, 2), a), SymmetryError);
  a(1, 0) = 1;
  a(0, 0) = -1;
  EXPECT_THROW(vicreg(Matrix::Ones(3, 2), a), DomainError);
}

TEST(NormalizeRows, BackwardIsTheAdjoint) {
  std::mt19937_64 rng(14);
  const Matrix y = gaussian(5, 3, rng);
  const Matrix up = gaussian(5, 3, rng);
  const Matrix numeric =
      numerical_gradient([&](const Matrix& x) { return (normalize_rows(x).array() * up.array()).sum(); }, y);
  EXPECT_LT(relative_error(normalize_rows_backward(y, up), numeric), 1e-7);
}

TEST(TrainingLoss, MinimizationFormsAgreeWithObjectives) {
  const Dataset data = gen_clusters(2, {2, 2}, 3, 1.0, 1);
  const ViewSet views = gen_views(data, 2, 1, 0.5, 2);
  const PartialKernel pk = partial_kernel(heat_kernel(ideal_graph(views), 1.0), observation_mask(views));
  const TrainingTargets targets = make_targets(views, pk);
  EXPECT_EQ(targets.pairs.size(), 4u);
  std::mt19937_64 rng(15);
  const Matrix y = gaussian(views.size(), 2, rng);
  for (auto kind : {ObjectiveKind::trace, ObjectiveKind::infonce, ObjectiveKind::barlow_twins, ObjectiveKind::vicreg}) {
    ObjectiveSpec spec;
    spec.kind = kind;
    const LossValue v = training_loss(spec, y, targets);
    const Matrix numeric = numerical_gradient([&](const Matrix& x) { return training_loss(spec, x, targets).value; }, y);
    EXPECT_LT(relative_error(v.gradient, numeric), 1e-5) << to_string(kind);
  }
  ObjectiveSpec trace;
  EXPECT_NEAR(training_loss(trace, y, targets).value, -trace_objective(y, targets.kernel, trace.penalties).value, 1e-12);
  EXPECT_EQ(parse_objective_kind("simclr"), ObjectiveKind::infonce);
  EXPECT_FALSE(parse_objective_kind("byol").has_value());
}
