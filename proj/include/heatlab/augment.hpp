#pragma once

// Observation masks induced by augmentation and partially observed kernels.

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "heatlab/dataset.hpp"
#include "heatlab/graph.hpp"
#include "heatlab/linalg.hpp"

namespace heatlab {

/// Exact nonnegative rational, kept in lowest terms.
struct Fraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  static Fraction reduced(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Symmetric set of observed index pairs over an n x n matrix.
///
/// Block masks (same-group pairs) are stored as group ids; general masks as a
/// dense byte matrix.
class Mask {
 public:
  /// Observes (i, j) iff group[i] == group[j]; the diagonal is included.
  static Mask from_groups(std::vector<Index> group);
  /// From a 0/1 indicator which must be symmetric.
  static Mask from_indicator(const Matrix& indicator);
  static Mask full(Index n);
  static Mask empty(Index n);

  Index size() const { return n_; }
  bool observed(Index i, Index j) const;
  std::int64_t observed_count() const;
  /// |Omega| / n^2 as an exact rational.
  Fraction fraction() const;
  /// W with W_ij = 1 on Omega, 0 elsewhere.
  Matrix indicator() const;
  /// Number of observed entries in each row.
  std::vector<Index> row_counts() const;
  bool is_block() const { return !groups_.empty(); }

 private:
  Index n_ = 0;
  std::vector<Index> groups_;
  std::vector<std::uint8_t> dense_;
};

/// Observed set of the augmentation protocol: all pairs of views sharing an
/// origin, across epochs, diagonal included. fraction() == 1/N.
Mask observation_mask(const ViewSet& views);

/// Each unordered pair i < j observed independently with probability p and
/// mirrored; the diagonal is always observed. Pairs draw their uniforms in a
/// fixed order, so for one seed the mask for a larger p contains the mask for
/// a smaller p.
Mask bernoulli_mask(Index n, double p, std::uint64_t seed);

struct PartialKernel {
  Matrix observed;  // W (.) H
  Mask mask;
  double t = 0;
  LaplacianKind kind = LaplacianKind::random_walk;
};

PartialKernel partial_kernel(const HeatKernel& kernel, const Mask& mask);
/// W (.) M for an arbitrary matrix.
Matrix apply_mask(const Matrix& m, const Mask& mask);

/// CSV pair list `i,j`, one line per observed ordered pair.
void write_csv(std::ostream& out, const Mask& mask);
Mask read_mask_csv(std::istream& in, Index n);

}  // namespace heatlab
