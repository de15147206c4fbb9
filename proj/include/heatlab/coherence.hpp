#pragma once

// Standard incoherence and the matrix-completion sample-complexity bounds.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "heatlab/augment.hpp"
#include "heatlab/linalg.hpp"

namespace heatlab {

struct IncoherenceResult {
  double mu = 0;  // max of the two sides
  double mu_left = 0;
  double mu_right = 0;
  Index rank = 0;
};

/// mu_0 = max over U, V of (n_k / r) max_i |factor^T e_i|^2 for the rank-r
/// singular factors. Without `rank`, r is the numerical rank (sigma_r >
/// 1e-10 sigma_1). With an explicit rank, sigma_r below that cutoff throws
/// RankDeficiencyError carrying the numerical rank.
IncoherenceResult incoherence(const Matrix& m, std::optional<Index> rank = std::nullopt);

/// (n / r) max_i |U^T e_i|^2 for a matrix with orthonormal columns.
double basis_incoherence(const Matrix& u);

enum class BoundKind { basic, structured, block };

struct BoundInput {
  std::int64_t dataset_size = 50000;  // N
  double min_cluster_size = 5000;     // n_min
  std::int64_t views = 2;             // a
  double side_coherence = 20;         // mu-bar_0
  double side_rank = 512;             // r-bar
  double c0 = 5;
  double coherence = 1;  // mu_0, basic and structured forms
  double rank = 1;       // r, basic and structured forms
};

/// Natural logarithms throughout.
///   basic:      c0 mu0 r log^2(n) / n
///   structured: c0 mu0 mu0b r rb log(mu0b rb) log(n) / n^2
///   block:      c0 mu0b rb log(mu0b rb) log(n) / (n n_min)
double sample_bound(BoundKind kind, const BoundInput& in, double n);

struct BoundRow {
  std::int64_t epochs = 0;
  std::int64_t n = 0;
  double p_star = 0;
  Fraction p;
};

struct BoundCurve {
  std::vector<BoundRow> rows;
  std::optional<std::int64_t> crossing_epoch;  // first epoch with p >= p*
};

/// Block bound against the protocol fraction 1/N for epochs in [first, last].
BoundCurve bound_curve(const BoundInput& in, std::int64_t first_epoch, std::int64_t last_epoch);

/// m = p* n^2 for balanced classes (n_min = n / c) at fixed n, one per c.
std::vector<double> classes_linear_law(const BoundInput& in, double n, const std::vector<int>& classes);

/// CSV `epochs,n,p_star,p`.
void write_csv(std::ostream& out, const BoundCurve& curve);

}  // namespace heatlab
