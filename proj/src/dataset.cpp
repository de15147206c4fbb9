#include "heatlab/dataset.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"

namespace heatlab {

namespace {

Matrix cluster_centers(int num_classes, Index dim, double sigma) {
  const double spacing = 10.0 * std::max(sigma, 1.0) * std::sqrt(static_cast<double>(dim));
  Matrix centers = Matrix::Zero(num_classes, dim);
  if (num_classes <= dim) {
    // Vertices s e_k of a scaled simplex: pairwise distance s sqrt(2).
    const double s = spacing / std::numbers::sqrt2;
    for (int k = 0; k < num_classes; ++k) centers(k, k) = s;
  } else {
    for (int k = 0; k < num_classes; ++k) centers(k, 0) = spacing * k;
  }
  return centers;
}

void write_rows(std::ostream& out, const Matrix& x, const std::vector<Index>& origins,
                const std::vector<int>& labels) {
  out << "id,origin,label";
  for (Index j = 0; j < x.cols(); ++j) out << ",x" << j;
  out << '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    out << i << ',' << origins[static_cast<std::size_t>(i)] << ','
        << (labels.empty() ? -1 : labels[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < x.cols(); ++j) out << ',' << csv::number(x(i, j));
    out << '\n';
  }
}

}  // namespace

Dataset gen_clusters(int num_classes, const std::vector<Index>& sizes, Index ambient_dim,
                     double sigma, std::uint64_t seed) {
  if (num_classes < 1) throw PreconditionError("gen_clusters: need at least one class");
  if (static_cast<int>(sizes.size()) != num_classes)
    throw DimensionError("gen_clusters: one size per class required");
  if (ambient_dim < 1) throw PreconditionError("gen_clusters: ambient dimension must be positive");
  if (!(sigma >= 0)) throw PreconditionError("gen_clusters: spread must be nonnegative");
  Index total = 0;
  for (Index s : sizes) {
    if (s < 1) throw PreconditionError("gen_clusters: every cluster needs a point");
    total += s;
  }

  const Matrix centers = cluster_centers(num_classes, ambient_dim, sigma);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset out;
  out.points.resize(total, ambient_dim);
  out.labels.reserve(static_cast<std::size_t>(total));
  out.num_classes = num_classes;
  out.seed = seed;
  Index row = 0;
  for (int k = 0; k < num_classes; ++k) {
    for (Index i = 0; i < sizes[static_cast<std::size_t>(k)]; ++i, ++row) {
      for (Index j = 0; j < ambient_dim; ++j) out.points(row, j) = centers(k, j) + sigma * noise(rng);
      out.labels.push_back(k);
    }
  }
  return out;
}

Dataset gen_two_moons(Index per_moon, Index ambient_dim, double noise, std::uint64_t seed) {
  if (per_moon < 1 || ambient_dim < 2) throw PreconditionError("gen_two_moons: bad size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset out;
  out.points = Matrix::Zero(2 * per_moon, ambient_dim);
  out.num_classes = 2;
  out.seed = seed;
  for (Index i = 0; i < 2 * per_moon; ++i) {
    const bool lower = i >= per_moon;
    const double u = std::numbers::pi * static_cast<double>(i % per_moon) /
                     static_cast<double>(std::max<Index>(per_moon - 1, 1));
    out.points(i, 0) = lower ? 1.0 - std::cos(u) : std::cos(u);
    out.points(i, 1) = lower ? 0.5 - std::sin(u) : std::sin(u);
    for (Index j = 0; j < ambient_dim; ++j) out.points(i, j) += noise * gauss(rng);
    out.labels.push_back(lower ? 1 : 0);
  }
  return out;
}

ViewSet gen_views(const Dataset& data, Index views_per_epoch, Index epochs, double jitter,
                  std::uint64_t seed) {
  if (views_per_epoch < 1 || epochs < 1)
    throw PreconditionError("gen_views: need a >= 1 and n_epochs >= 1");
  if (!(jitter >= 0)) throw PreconditionError("gen_views: jitter must be nonnegative");

  ViewSet vs;
  vs.num_origins = data.size();
  vs.views_per_epoch = views_per_epoch;
  vs.epochs = epochs;
  const Index k = vs.views_per_origin();
  const Index n = vs.size();
  vs.views.resize(n, data.ambient_dim());
  vs.origins.resize(static_cast<std::size_t>(n));
  if (!data.labels.empty()) vs.labels.resize(static_cast<std::size_t>(n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index o = 0; o < vs.num_origins; ++o) {
    for (Index v = 0; v < k; ++v) {
      const Index row = o * k + v;
      if (jitter == 0.0) {
        vs.views.row(row) = data.points.row(o);
      } else {
        for (Index j = 0; j < data.ambient_dim(); ++j)
          vs.views(row, j) = data.points(o, j) + jitter * noise(rng);
      }
      vs.origins[static_cast<std::size_t>(row)] = o;
      if (!data.labels.empty())
        vs.labels[static_cast<std::size_t>(row)] = data.labels[static_cast<std::size_t>(o)];
    }
  }
  return vs;
}

void write_csv(std::ostream& out, const Dataset& data) {
  std::vector<Index> ids(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) ids[static_cast<std::size_t>(i)] = i;
  write_rows(out, data.points, ids, data.labels);
}

void write_csv(std::ostream& out, const ViewSet& views) {
  write_rows(out, views.views, views.origins, views.labels);
}

ViewSet read_view_csv(std::istream& in, Index views_per_epoch, Index epochs) {
  std::string line;
  if (!std::getline(in, line)) throw DimensionError("read_view_csv: empty input");
  const auto header = csv::split(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "origin" || header[2] != "label")
    throw DimensionError("read_view_csv: unexpected header");
  const Index dim = static_cast<Index>(header.size()) - 3;

  std::vector<std::vector<double>> rows;
  ViewSet vs;
  bool any_label = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (static_cast<Index>(f.size()) != dim + 3) throw DimensionError("read_view_csv: ragged row");
    vs.origins.push_back(static_cast<Index>(csv::to_int(f[1])));
    const int label = static_cast<int>(csv::to_int(f[2]));
    any_label = any_label || label >= 0;
    vs.labels.push_back(label);
    std::vector<double> x;
    for (Index j = 0; j < dim; ++j) x.push_back(csv::to_double(f[static_cast<std::size_t>(3 + j)]));
    rows.push_back(std::move(x));
  }
  if (!any_label) vs.labels.clear();
  vs.views.resize(static_cast<Index>(rows.size()), dim);
  for (Index i = 0; i < vs.views.rows(); ++i)
    for (Index j = 0; j < dim; ++j) vs.views(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  vs.views_per_epoch = views_per_epoch;
  vs.epochs = epochs;
  const Index k = views_per_epoch * epochs;
  if (k < 1 || vs.views.rows() % k != 0)
    throw DimensionError("read_view_csv: row count is not a multiple of a * n_epochs");
  vs.num_origins = vs.views.rows() / k;
  return vs;
}

}  // namespace heatlab
