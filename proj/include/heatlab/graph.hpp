#pragma once

// Weighted graphs, Laplacians, heat kernels and Laplacian eigenmaps.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "heatlab/dataset.hpp"
#include "heatlab/embedding.hpp"
#include "heatlab/linalg.hpp"

namespace heatlab {

enum class LaplacianKind { unnormalized, random_walk, symmetric };

const char* to_string(LaplacianKind kind);
std::optional<LaplacianKind> parse_laplacian_kind(const std::string& name);

/// Undirected weighted graph. The adjacency is symmetric and nonnegative;
/// degrees are computed once at construction.
class Graph {
 public:
  explicit Graph(Matrix adjacency, std::vector<int> cluster_labels = {},
                 std::vector<Index> origin_labels = {});

  Index size() const { return adjacency_.rows(); }
  const Matrix& adjacency() const { return adjacency_; }
  const Vector& degrees() const { return degrees_; }
  const std::vector<int>& cluster_labels() const { return cluster_labels_; }
  const std::vector<Index>& origin_labels() const { return origin_labels_; }

  /// Set when some node has zero degree (breaks the normalized Laplacians).
  bool has_isolated_node() const { return !isolated_.empty(); }
  const std::vector<Index>& isolated_nodes() const { return isolated_; }

 private:
  Matrix adjacency_;
  Vector degrees_;
  std::vector<int> cluster_labels_;
  std::vector<Index> origin_labels_;
  std::vector<Index> isolated_;
};

struct EpsilonRule {
  double epsilon;
};
struct KnnRule {
  Index k;
};
using NeighborRule = std::variant<EpsilonRule, KnnRule>;

/// Gaussian-weighted neighbor graph: w = exp(-|x - y|^2 / width) on edges with
/// |x - y| < epsilon, or on kNN edges symmetrized by union.
Graph gaussian_graph(const Matrix& points, const NeighborRule& rule, double width);

struct UnitWeight {};
/// exp(kappa z_i^T z_j) on positive pairs; rows of `embedding` must be unit.
struct VmfWeight {
  double kappa;
  Matrix embedding;
};
/// Arbitrary reweighting w(i, j) of positive pairs.
struct CustomWeight {
  std::function<double(Index, Index)> weight;
};
using ViewWeighting = std::variant<UnitWeight, VmfWeight, CustomWeight>;

/// Same-origin graph over views: positive pairs get a weight, everything
/// else (including the diagonal) is zero.
Graph view_graph(const ViewSet& views, const ViewWeighting& weighting = UnitWeight{});

/// Connects every pair of distinct views that share a cluster label.
Graph ideal_graph(const ViewSet& views);

Matrix laplacian(const Graph& g, LaplacianKind kind);

struct HeatKernel {
  double t = 0;
  LaplacianKind kind = LaplacianKind::random_walk;
  Matrix H;
};

/// exp(-t L). The random-walk kernel is formed as D^{-1/2} exp(-t L_sym) D^{1/2}
/// and is therefore row-stochastic; it is symmetric only for regular graphs.
HeatKernel heat_kernel(const Graph& g, double t, LaplacianKind kind = LaplacianKind::random_walk);

/// Keeps the components of a heat kernel on its `rank` largest eigenvalues.
/// Requires a symmetric kernel.
Matrix truncate_kernel(const HeatKernel& kernel, Index rank);

/// Rows of the d eigenvectors with the smallest Laplacian eigenvalues. With
/// `exclude_trivial` the constant mode (D^{1/2} 1 for the symmetric kind) is
/// removed before selection, so Z is orthogonal to it even when the graph has
/// several components. Random-walk eigenvectors are D^{-1/2} v for L_sym
/// eigenvectors v, scaled to unit columns.
Embedding spectral_embedding(const Graph& g, Index d,
                             LaplacianKind kind = LaplacianKind::random_walk,
                             bool exclude_trivial = true);

/// CSV edge list `i,j,w`, one line per undirected edge with i < j.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in, Index num_nodes);

}  // namespace heatlab
