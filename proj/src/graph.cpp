#include "heatlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"

namespace heatlab {

const char* to_string(LaplacianKind kind) {
  switch (kind) {
    case LaplacianKind::unnormalized:
      return "unnormalized";
    case LaplacianKind::random_walk:
      return "random_walk";
    case LaplacianKind::symmetric:
      return "symmetric";
  }
  return "?";
}

std::optional<LaplacianKind> parse_laplacian_kind(const std::string& name) {
  if (name == "unnormalized") return LaplacianKind::unnormalized;
  if (name == "random_walk" || name == "rw") return LaplacianKind::random_walk;
  if (name == "symmetric" || name == "sym") return LaplacianKind::symmetric;
  return std::nullopt;
}

Graph::Graph(Matrix adjacency, std::vector<int> cluster_labels, std::vector<Index> origin_labels)
    : adjacency_(std::move(adjacency)),
      cluster_labels_(std::move(cluster_labels)),
      origin_labels_(std::move(origin_labels)) {
  const Index n = adjacency_.rows();
  if (adjacency_.cols() != n) throw DimensionError("Graph: adjacency must be square");
  if (!adjacency_.allFinite()) throw DomainError("Graph: non-finite weight");
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      if (adjacency_(i, j) != adjacency_(j, i)) throw SymmetryError("Graph: adjacency not symmetric");
      if (adjacency_(i, j) < 0) throw DomainError("Graph: negative weight");
    }
  if (!cluster_labels_.empty() && static_cast<Index>(cluster_labels_.size()) != n)
    throw DimensionError("Graph: one cluster label per node");
  if (!origin_labels_.empty() && static_cast<Index>(origin_labels_.size()) != n)
    throw DimensionError("Graph: one origin label per node");
  degrees_ = adjacency_.rowwise().sum();
  for (Index i = 0; i < n; ++i)
    if (degrees_(i) == 0.0) isolated_.push_back(i);
}

Graph gaussian_graph(const Matrix& points, const NeighborRule& rule, double width) {
  const Index n = points.rows();
  if (n < 2) throw PreconditionError("gaussian_graph: need at least two points");
  if (!(width > 0)) throw PreconditionError("gaussian_graph: kernel width must be positive");

  Matrix sq(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) sq(i, j) = (points.row(i) - points.row(j)).squaredNorm();

  Matrix a = Matrix::Zero(n, n);
  auto weight = [&](Index i, Index j) { return std::exp(-sq(i, j) / width); };

  if (const auto* eps = std::get_if<EpsilonRule>(&rule)) {
    if (!(eps->epsilon > 0)) throw PreconditionError("gaussian_graph: epsilon must be positive");
    const double eps2 = eps->epsilon * eps->epsilon;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (sq(i, j) < eps2) a(i, j) = a(j, i) = weight(i, j);
  } else {
    const Index k = std::get<KnnRule>(rule).k;
    if (k < 1 || k >= n) throw PreconditionError("gaussian_graph: need 1 <= k < n");
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      std::iota(order.begin(), order.end(), Index(0));
      std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return sq(i, x) < sq(i, y); });
      Index taken = 0;
      for (Index j : order) {
        if (j == i) continue;
        a(i, j) = a(j, i) = weight(i, j);
        if (++taken == k) break;
      }
    }
  }
  return Graph(std::move(a));
}

Graph view_graph(const ViewSet& views, const ViewWeighting& weighting) {
  const Index n = views.size();
  if (static_cast<Index>(views.origins.size()) != n)
    throw DimensionError("view_graph: origin labels do not match view count");
  const auto* vmf = std::get_if<VmfWeight>(&weighting);
  if (vmf) {
    if (vmf->embedding.rows() != n) throw DimensionError("view_graph: embedding rows != views");
    for (Index i = 0; i < n; ++i)
      if (std::abs(vmf->embedding.row(i).norm() - 1.0) > 1e-8)
        throw PreconditionError("view_graph: vMF weighting needs unit-norm embedding rows");
  }
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (views.origins[static_cast<std::size_t>(i)] != views.origins[static_cast<std::size_t>(j)]) continue;
      double w = 1.0;
      if (vmf) {
        w = std::exp(vmf->kappa * vmf->embedding.row(i).dot(vmf->embedding.row(j)));
      } else if (const auto* custom = std::get_if<CustomWeight>(&weighting)) {
        w = custom->weight(i, j);
      }
      a(i, j) = a(j, i) = w;
    }
  }
  return Graph(std::move(a), views.labels, views.origins);
}

Graph ideal_graph(const ViewSet& views) {
  const Index n = views.size();
  if (static_cast<Index>(views.labels.size()) != n)
    throw PreconditionError("ideal_graph: cluster labels are required");
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && views.labels[static_cast<std::size_t>(i)] == views.labels[static_cast<std::size_t>(j)])
        a(i, j) = 1.0;
  return Graph(std::move(a), views.labels, views.origins);
}

namespace {

void require_positive_degrees(const Graph& g) {
  if (g.has_isolated_node())
    throw DegenerateDegreeError("normalized Laplacian: node " + std::to_string(g.isolated_nodes().front()) +
                                " has zero degree");
}

Matrix symmetric_laplacian(const Graph& g) {
  require_positive_degrees(g);
  const Index n = g.size();
  const Vector s = g.degrees().array().rsqrt();
  Matrix l = Matrix::Identity(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) l(i, j) -= g.adjacency()(i, j) * (s(i) * s(j));
  return l;
}

}  // namespace

Matrix laplacian(const Graph& g, LaplacianKind kind) {
  const Index n = g.size();
  switch (kind) {
    case LaplacianKind::unnormalized: {
      Matrix l = -g.adjacency();
      l.diagonal() += g.degrees();
      return l;
    }
    case LaplacianKind::random_walk: {
      require_positive_degrees(g);
      Matrix l = Matrix::Identity(n, n);
      for (Index i = 0; i < n; ++i) l.row(i) -= g.adjacency().row(i) / g.degrees()(i);
      return l;
    }
    case LaplacianKind::symmetric:
      return symmetric_laplacian(g);
  }
  throw PreconditionError("laplacian: unknown kind");
}

HeatKernel heat_kernel(const Graph& g, double t, LaplacianKind kind) {
  if (!(t > 0)) throw PreconditionError("heat_kernel: diffusion time must be positive");
  HeatKernel out;
  out.t = t;
  out.kind = kind;
  switch (kind) {
    case LaplacianKind::unnormalized:
      out.H = exp_neg_sym(laplacian(g, kind), t);
      break;
    case LaplacianKind::symmetric:
      out.H = exp_neg_sym(symmetric_laplacian(g), t);
      break;
    case LaplacianKind::random_walk: {
      const Matrix e = exp_neg_sym(symmetric_laplacian(g), t);
      const Vector root = g.degrees().array().sqrt();
      out.H.resize(g.size(), g.size());
      for (Index j = 0; j < g.size(); ++j)
        for (Index i = 0; i < g.size(); ++i) out.H(i, j) = e(i, j) * (root(j) / root(i));
      break;
    }
  }
  return out;
}

Matrix truncate_kernel(const HeatKernel& kernel, Index rank) {
  const Index n = kernel.H.rows();
  if (rank < 1 || rank > n) throw PreconditionError("truncate_kernel: rank out of range");
  const auto eig = sym_eig(kernel.H);
  const auto top = eig.eigenvectors.rightCols(rank);
  Matrix out = top * eig.eigenvalues.tail(rank).asDiagonal() * top.transpose();
  return (out + out.transpose()) / 2.0;
}

Embedding spectral_embedding(const Graph& g, Index d, LaplacianKind kind, bool exclude_trivial) {
  const Index n = g.size();
  const Index available = exclude_trivial ? n - 1 : n;
  if (d < 1 || d > available)
    throw PreconditionError("spectral_embedding: d must be in [1, " + std::to_string(available) + "]");

  Matrix s;
  Vector trivial;
  if (kind == LaplacianKind::unnormalized) {
    s = laplacian(g, kind);
    trivial = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  } else {
    s = symmetric_laplacian(g);
    trivial = g.degrees().array().sqrt();
    trivial.normalize();
  }
  if (exclude_trivial) {
    // Lift the trivial mode above the rest of the spectrum; eigenvectors
    // orthogonal to it are unchanged.
    const double lift = 2.0 * s.norm() + 1.0;
    s += lift * trivial * trivial.transpose();
    s = (s + s.transpose()).eval() / 2.0;
  }

  const auto eig = sym_eig(s);
  Embedding out(eig.eigenvectors.leftCols(d));
  if (d < available && eig.eigenvalues(d) - eig.eigenvalues(d - 1) < 1e-10)
    out.warnings.emplace_back("degenerate cut: eigengap below 1e-10 at the selected dimension");

  if (kind == LaplacianKind::random_walk) {
    const Vector inv_root = g.degrees().array().rsqrt();
    out.Z = inv_root.asDiagonal() * out.Z;
    for (Index j = 0; j < d; ++j) out.Z.col(j).normalize();
  }
  return out;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  const Matrix& a = g.adjacency();
  for (Index i = 0; i < g.size(); ++i)
    for (Index j = i + 1; j < g.size(); ++j)
      if (a(i, j) != 0.0) out << i << ',' << j << ',' << csv::number(a(i, j)) << '\n';
}

Graph read_edge_list(std::istream& in, Index num_nodes) {
  Matrix a = Matrix::Zero(num_nodes, num_nodes);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 3) throw DimensionError("read_edge_list: expected i,j,w");
    const Index i = static_cast<Index>(csv::to_int(f[0]));
    const Index j = static_cast<Index>(csv::to_int(f[1]));
    if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes || i == j)
      throw DimensionError("read_edge_list: bad edge " + line);
    a(i, j) = a(j, i) = csv::to_double(f[2]);
  }
  return Graph(std::move(a));
}

}  // namespace heatlab
