#pragma once

#include <cstdint>
#include <vector>

#include "heatlab/linalg.hpp"

namespace heatlab {

struct KMeansResult {
  std::vector<int> assignment;
  Matrix centers;
  double inertia = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10,
                    int max_iters = 300);

/// Fraction of points whose cluster's majority label matches their own.
double purity(const std::vector<int>& assignment, const std::vector<int>& labels);

double median(std::vector<double> values);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace heatlab
