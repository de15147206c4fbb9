#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "heatlab/augment.hpp"
#include "heatlab/dataset.hpp"
#include "heatlab/graph.hpp"
#include "support.hpp"

using namespace heatlab;

namespace {

ViewSet protocol(Index origins, Index a, Index epochs, double jitter = 0.0) {
  const Dataset data = gen_clusters(1, {origins}, 2, 1.0, 11);
  return gen_views(data, a, epochs, jitter, 12);
}

}  // namespace

TEST(GenClusters, SingleClusterHasOneLabel) {
  const Dataset d = gen_clusters(1, {5}, 3, 1.0, 1);
  EXPECT_EQ(d.size(), 5);
  for (int label : d.labels) EXPECT_EQ(label, 0);
}

TEST(GenClusters, ZeroSpreadGivesPointMasses) {
  const Dataset d = gen_clusters(2, {4, 3}, 3, 0.0, 2);
  for (Index i = 0; i < d.size(); ++i)
    for (Index j = 0; j < d.size(); ++j)
      if (d.labels[static_cast<std::size_t>(i)] == d.labels[static_cast<std::size_t>(j)])
        EXPECT_EQ((d.points.row(i) - d.points.row(j)).norm(), 0.0);
}

TEST(GenClusters, NearestCenterRecoversLabels) {
  const Dataset d = gen_clusters(3, {10, 10, 10}, 4, 1.0, 3);
  Matrix centers = Matrix::Zero(3, 4);
  for (Index i = 0; i < d.size(); ++i) centers.row(d.labels[static_cast<std::size_t>(i)]) += d.points.row(i) / 10.0;
  for (Index i = 0; i < d.size(); ++i) {
    Index best = 0;
    (centers.rowwise() - d.points.row(i)).rowwise().squaredNorm().minCoeff(&best);
    EXPECT_EQ(best, d.labels[static_cast<std::size_t>(i)]);
  }
}

TEST(GenClusters, DeterministicForASeed) {
  EXPECT_EQ(gen_clusters(3, {4, 5, 6}, 3, 1.0, 9).points, gen_clusters(3, {4, 5, 6}, 3, 1.0, 9).points);
  EXPECT_NE(gen_clusters(3, {4, 5, 6}, 3, 1.0, 9).points, gen_clusters(3, {4, 5, 6}, 3, 1.0, 10).points);
  EXPECT_THROW(gen_clusters(2, {3}, 2, 1.0, 1), DimensionError);
}

TEST(GenViews, CountsAndOrdering) {
  const ViewSet v = protocol(3, 2, 1);
  EXPECT_EQ(v.size(), 6);
  EXPECT_EQ(v.views.rows(), 6);
  const std::vector<Index> expected{0, 0, 1, 1, 2, 2};
  EXPECT_EQ(v.origins, expected);
}

TEST(GenViews, ZeroJitterCopiesOrigins) {
  const Dataset data = gen_clusters(2, {3, 3}, 2, 1.0, 4);
  const ViewSet v = gen_views(data, 2, 2, 0.0, 5);
  for (Index i = 0; i < v.size(); ++i) EXPECT_EQ(v.views.row(i), data.points.row(v.origins[static_cast<std::size_t>(i)]));
}

TEST(GenViews, LargeProtocolHasThousandViewsPerOrigin) {
  const ViewSet v = protocol(50, 2, 500, 0.1);
  EXPECT_EQ(v.size(), 50000);
  std::map<Index, Index> count;
  for (Index o : v.origins) ++count[o];
  EXPECT_EQ(count.size(), 50u);
  for (const auto& [origin, c] : count) EXPECT_EQ(c, 1000) << origin;
}

TEST(GenViews, CsvRoundTrip) {
  const ViewSet v = protocol(3, 2, 2, 0.3);
  std::stringstream s;
  write_csv(s, v);
  const ViewSet back = read_view_csv(s, 2, 2);
  EXPECT_EQ(back.views, v.views);
  EXPECT_EQ(back.origins, v.origins);
  EXPECT_EQ(back.labels, v.labels);
}

TEST(ObservationMask, SmallProtocolFraction) {
  const Mask m = observation_mask(protocol(2, 2, 1));
  EXPECT_EQ(m.observed_count(), 8);
  EXPECT_EQ(m.fraction(), Fraction::reduced(1, 2));
  const Mask one = observation_mask(protocol(1, 3, 2));
  EXPECT_EQ(one.fraction(), Fraction::reduced(1, 1));
}

TEST(ObservationMask, EnumerationMatchesCount) {
  const ViewSet v = protocol(10, 2, 3);
  const Mask m = observation_mask(v);
  std::int64_t count = 0;
  for (Index i = 0; i < v.size(); ++i)
    for (Index j = 0; j < v.size(); ++j) {
      const bool same = v.origins[static_cast<std::size_t>(i)] == v.origins[static_cast<std::size_t>(j)];
      EXPECT_EQ(m.observed(i, j), same);
      count += same;
    }
  EXPECT_EQ(count, 360);
  EXPECT_EQ(m.observed_count(), 360);
  EXPECT_EQ(m.fraction(), Fraction::reduced(1, 10));
}

TEST(PartialKernel, FullEmptyAndBlockMasks) {
  const Dataset data = gen_clusters(3, {3, 3, 3}, 2, 0.5, 6);
  const ViewSet v = gen_views(data, 2, 1, 0.1, 7);
  const HeatKernel h = heat_kernel(ideal_graph(v), 0.5, LaplacianKind::symmetric);
  EXPECT_EQ(partial_kernel(h, Mask::full(v.size())).observed, h.H);
  EXPECT_EQ(partial_kernel(h, Mask::empty(v.size())).observed, Matrix::Zero(v.size(), v.size()));
  std::vector<Index> group(v.labels.begin(), v.labels.end());
  const Mask block = Mask::from_groups(group);
  const Matrix hat = partial_kernel(h, block).observed;
  for (Index i = 0; i < v.size(); ++i)
    for (Index j = 0; j < v.size(); ++j)
      EXPECT_EQ(hat(i, j), group[static_cast<std::size_t>(i)] == group[static_cast<std::size_t>(j)] ? h.H(i, j) : 0.0);
  EXPECT_THROW(apply_mask(Matrix::Zero(3, 3), block), DimensionError);
}

TEST(BernoulliMask, CertainVanishingAndTypical) {
  const Mask full = bernoulli_mask(12, 1.0, 1);
  EXPECT_EQ(full.observed_count(), 144);
  const Mask diag = bernoulli_mask(10, 1e-9, 2);
  EXPECT_EQ(diag.observed_count(), 10);
  for (Index i = 0; i < 10; ++i) EXPECT_TRUE(diag.observed(i, i));

  const Index n = 100;
  const Mask m = bernoulli_mask(n, 0.3, 3);
  const double pairs = n * (n - 1) / 2.0;
  const double hits = (m.observed_count() - n) / 2.0;
  const double sigma = std::sqrt(pairs * 0.3 * 0.7);
  EXPECT_LT(std::abs(hits - 0.3 * pairs), 3 * sigma);
  EXPECT_THROW(bernoulli_mask(5, 0.0, 1), PreconditionError);
}

TEST(BernoulliMask, SymmetricNestedAndDeterministic) {
  const Mask small = bernoulli_mask(30, 0.2, 4);
  const Mask large = bernoulli_mask(30, 0.6, 4);
  EXPECT_EQ(small.indicator(), bernoulli_mask(30, 0.2, 4).indicator());
  EXPECT_EQ(large.indicator(), large.indicator().transpose());
  EXPECT_TRUE(((small.indicator().array() <= large.indicator().array())).all());
}

TEST(Mask, CsvRoundTripAndRowCounts) {
  const Mask m = observation_mask(protocol(3, 2, 1));
  std::stringstream s;
  write_csv(s, m);
  EXPECT_EQ(read_mask_csv(s, 6).indicator(), m.indicator());
  for (Index c : m.row_counts()) EXPECT_EQ(c, 2);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = 1;
  EXPECT_THROW(Mask::from_indicator(bad), SymmetryError);
}
