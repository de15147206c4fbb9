#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "heatlab/coherence.hpp"
#include "heatlab/scenarios.hpp"
#include "support.hpp"

using namespace heatlab;
using heatlab::testing::gaussian;

namespace {

// Reference values evaluated independently in 50-digit arithmetic for the
// figure constants N = 5e4, n_min = 5000, a = 2, mu = 20, r = 512, c0 = 5.
constexpr std::int64_t kCrossingEpoch = 864;
constexpr std::int64_t kCrossingEpochDoubledC0 = 1798;
constexpr double kPStarEpoch1 = 1.08862473e-2;
constexpr double kPStarEpoch863 = 2.0021640e-5;
constexpr double kPStarEpoch864 = 1.9999734e-5;
constexpr double kPStarEpoch1000 = 1.74179957e-5;

Matrix block_ones(const std::vector<Index>& sizes) {
  const Index n = std::accumulate(sizes.begin(), sizes.end(), Index{0});
  Matrix m = Matrix::Zero(n, n);
  Index at = 0;
  for (Index s : sizes) {
    m.block(at, at, s, s).setOnes();
    at += s;
  }
  return m;
}

}  // namespace

TEST(Incoherence, SpikedBasisIsMaximal) {
  Matrix u = Matrix::Zero(10, 2);
  u(0, 0) = u(1, 1) = 1;
  EXPECT_DOUBLE_EQ(basis_incoherence(u), 5.0);
  const auto r = incoherence(u * u.transpose(), 2);
  EXPECT_DOUBLE_EQ(r.mu, 5.0);
}

TEST(Incoherence, ConstantMatrixIsMinimal) {
  const auto r = incoherence(Matrix::Constant(10, 10, 0.3));
  EXPECT_EQ(r.rank, 1);
  EXPECT_NEAR(r.mu, 1.0, 1e-12);
}

TEST(Incoherence, BlockOnesMatchTheClosedFormViaEigenvectors) {
  const std::vector<Index> sizes{2, 5, 3, 6};
  const Matrix m = block_ones(sizes);
  const auto r = incoherence(m, 4);
  // Independent oracle: top eigenvectors from Eigen.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Matrix u = eig.eigenvectors().rightCols(4);
  const double oracle = 16.0 / 4.0 * u.rowwise().squaredNorm().maxCoeff();
  EXPECT_NEAR(r.mu, oracle, 1e-12);
  EXPECT_NEAR(r.mu, 16.0 / (4.0 * 2.0), 1e-12);
  EXPECT_NEAR(r.mu_left, r.mu_right, 1e-12);
}

TEST(Incoherence, RankErrors) {
  const Matrix m = block_ones({3, 3});
  EXPECT_THROW(incoherence(m, 0), PreconditionError);
  EXPECT_THROW(incoherence(m, 7), PreconditionError);
  try {
    incoherence(m, 3);
    FAIL() << "expected rank deficiency";
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.numerical_rank(), 2);
  }
}

TEST(Incoherence, BoundsHoldForRandomLowRank) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const Index rows = 5 + t % 20;
    const Index cols = 4 + (t * 7) % 15;
    const Index r = 1 + t % 3;
    const auto res = incoherence(gaussian(rows, r, rng) * gaussian(r, cols, rng));
    EXPECT_EQ(res.rank, r);
    EXPECT_GE(res.mu_left, 1 - 1e-12);
    EXPECT_GE(res.mu_right, 1 - 1e-12);
    EXPECT_LE(res.mu_left, static_cast<double>(rows) / r + 1e-12);
    EXPECT_LE(res.mu_right, static_cast<double>(cols) / r + 1e-12);
  }
}

TEST(SampleBound, UnitLogCases) {
  BoundInput in;
  in.c0 = 1;
  in.coherence = 1;
  in.rank = 1;
  EXPECT_NEAR(sample_bound(BoundKind::basic, in, std::exp(1.0)), std::exp(-1.0), 1e-15);
  in.side_coherence = std::exp(1.0);
  in.side_rank = 1;
  in.c0 = 3;
  in.coherence = 2;
  in.rank = 4;
  const double n = 50;
  EXPECT_NEAR(sample_bound(BoundKind::structured, in, n), 3 * 2 * 4 * std::log(n) / (n * n) * std::exp(1.0), 1e-15);
  EXPECT_THROW(sample_bound(BoundKind::basic, in, 1.0), PreconditionError);
}

TEST(SampleBound, BlockFormAtTheFigureConstants) {
  const BoundInput in;
  EXPECT_NEAR(sample_bound(BoundKind::block, in, 1e8), kPStarEpoch1000, 1e-13);
  EXPECT_LT(sample_bound(BoundKind::block, in, 1e8), 2e-5);
}

TEST(BoundCurve, FigureCrossingIsPinned) {
  const BoundCurve curve = bound_curve(BoundInput{}, 1, 1000);
  ASSERT_EQ(curve.rows.size(), 1000u);
  ASSERT_TRUE(curve.crossing_epoch.has_value());
  EXPECT_EQ(*curve.crossing_epoch, kCrossingEpoch);
  EXPECT_NEAR(curve.rows[0].p_star, kPStarEpoch1, 1e-10);
  EXPECT_NEAR(curve.rows[862].p_star, kPStarEpoch863, 1e-12);
  EXPECT_NEAR(curve.rows[863].p_star, kPStarEpoch864, 1e-12);
  EXPECT_NEAR(curve.rows[999].p_star, kPStarEpoch1000, 1e-13);
  for (std::size_t i = 1; i < curve.rows.size(); ++i) {
    EXPECT_LT(curve.rows[i].p_star, curve.rows[i - 1].p_star);
    EXPECT_GT(curve.rows[i].n, curve.rows[i - 1].n);
    EXPECT_EQ(curve.rows[i].p, Fraction::reduced(1, 50000));
  }
}

TEST(BoundCurve, LargerConstantDelaysTheCrossing) {
  std::optional<std::int64_t> previous;
  for (double c0 : {1.0, 2.5, 5.0, 10.0, 20.0}) {
    BoundInput in;
    in.c0 = c0;
    const auto crossing = bound_curve(in, 1, 5000).crossing_epoch;
    ASSERT_TRUE(crossing.has_value()) << c0;
    if (previous) EXPECT_GE(*crossing, *previous);
    previous = crossing;
  }
  BoundInput doubled;
  doubled.c0 = 10;
  EXPECT_EQ(bound_curve(doubled, 1, 5000).crossing_epoch, kCrossingEpochDoubledC0);
}

TEST(BoundCurve, SingleInstanceCrossesWhereBoundDropsBelowOne) {
  BoundInput in;
  in.dataset_size = 1;
  in.min_cluster_size = 1;
  in.side_coherence = 2;
  in.side_rank = 2;
  const BoundCurve curve = bound_curve(in, 1, 100);
  EXPECT_EQ(curve.rows.front().p, Fraction::reduced(1, 1));
  ASSERT_TRUE(curve.crossing_epoch.has_value());
  const auto at = static_cast<std::size_t>(*curve.crossing_epoch - 1);
  EXPECT_LE(curve.rows[at].p_star, 1.0);
  if (at > 0) EXPECT_GT(curve.rows[at - 1].p_star, 1.0);
}

TEST(BoundCurve, CsvSchema) {
  const BoundCurve curve = bound_curve(BoundInput{}, 1, 3);
  std::ostringstream s;
  write_csv(s, curve);
  std::istringstream lines(s.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "epochs,n,p_star,p");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(ClassesLaw, LinearInClassCount) {
  BoundInput in;
  in.c0 = 1;
  const double n = 1e6;
  const double base = in.side_coherence * in.side_rank * std::log(in.side_coherence * in.side_rank) * std::log(n);
  const std::vector<int> cs{1, 2, 4, 8, 16};
  const auto m = classes_linear_law(in, n, cs);
  EXPECT_NEAR(m[0], base, 1e-9 * base);
  for (std::size_t i = 1; i < m.size(); ++i) EXPECT_NEAR(m[i] / m[i - 1], 2.0, 1e-14);
  // Least-squares slope over c in {2, 4, 8, 16}.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 1; i < cs.size(); ++i) {
    sx += cs[i];
    sy += m[i];
    sxx += cs[i] * cs[i];
    sxy += cs[i] * m[i];
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  EXPECT_NEAR(slope / base, 1.0, 1e-10);
}

TEST(CoherenceStudy, SmallGridAgreesWithClosedForms) {
  CoherenceScenario s;
  s.max_partition_n = 7;
  s.max_n = 20;
  s.grid_step = 6;
  s.random_trials = 20;
  const auto cases = coherence_study(s);
  int closed = 0;
  for (const auto& c : cases) {
    if (std::isnan(c.expected)) continue;
    ++closed;
    EXPECT_NEAR(c.mu, c.expected, 1e-9 * c.expected) << c.kind << " " << c.layout;
  }
  EXPECT_GT(closed, 15);
}
