#include "heatlab/augment.hpp"

#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"

namespace heatlab {

Fraction Fraction::reduced(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw DomainError("Fraction: denominator must be positive");
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

Mask Mask::from_groups(std::vector<Index> group) {
  Mask m;
  m.n_ = static_cast<Index>(group.size());
  m.groups_ = std::move(group);
  return m;
}

Mask Mask::from_indicator(const Matrix& indicator) {
  const Index n = indicator.rows();
  if (indicator.cols() != n) throw DimensionError("Mask: indicator must be square");
  Mask m;
  m.n_ = n;
  m.dense_.assign(static_cast<std::size_t>(n * n), 0);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double w = indicator(i, j);
      if (w != 0.0 && w != 1.0) throw DomainError("Mask: indicator entries must be 0 or 1");
      if (w != indicator(j, i)) throw SymmetryError("Mask: indicator must be symmetric");
      m.dense_[static_cast<std::size_t>(i * n + j)] = w == 1.0 ? 1 : 0;
    }
  return m;
}

Mask Mask::full(Index n) { return from_groups(std::vector<Index>(static_cast<std::size_t>(n), 0)); }

Mask Mask::empty(Index n) {
  Mask m;
  m.n_ = n;
  m.dense_.assign(static_cast<std::size_t>(n * n), 0);
  return m;
}

bool Mask::observed(Index i, Index j) const {
  if (!groups_.empty()) return groups_[static_cast<std::size_t>(i)] == groups_[static_cast<std::size_t>(j)];
  return dense_[static_cast<std::size_t>(i * n_ + j)] != 0;
}

std::int64_t Mask::observed_count() const {
  if (!groups_.empty()) {
    std::map<Index, std::int64_t> sizes;
    for (Index g : groups_) ++sizes[g];
    std::int64_t total = 0;
    for (const auto& [g, s] : sizes) total += s * s;
    return total;
  }
  return std::accumulate(dense_.begin(), dense_.end(), std::int64_t(0));
}

Fraction Mask::fraction() const {
  if (n_ == 0) return Fraction{0, 1};
  return Fraction::reduced(observed_count(), static_cast<std::int64_t>(n_) * n_);
}

Matrix Mask::indicator() const {
  Matrix w(n_, n_);
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < n_; ++i) w(i, j) = observed(i, j) ? 1.0 : 0.0;
  return w;
}

std::vector<Index> Mask::row_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(n_), 0);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (observed(i, j)) ++counts[static_cast<std::size_t>(i)];
  return counts;
}

Mask observation_mask(const ViewSet& views) {
  if (static_cast<Index>(views.origins.size()) != views.size())
    throw DimensionError("observation_mask: origin labels do not match view count");
  return Mask::from_groups(views.origins);
}

Mask bernoulli_mask(Index n, double p, std::uint64_t seed) {
  if (!(p > 0 && p <= 1)) throw PreconditionError("bernoulli_mask: need 0 < p <= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Matrix w = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (uniform(rng) < p) w(i, j) = w(j, i) = 1.0;
  return Mask::from_indicator(w);
}

Matrix apply_mask(const Matrix& m, const Mask& mask) {
  if (m.rows() != mask.size() || m.cols() != mask.size())
    throw DimensionError("apply_mask: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", mask is " + std::to_string(mask.size()));
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (mask.observed(i, j)) out(i, j) = m(i, j);
  return out;
}

PartialKernel partial_kernel(const HeatKernel& kernel, const Mask& mask) {
  PartialKernel out;
  out.observed = apply_mask(kernel.H, mask);
  out.mask = mask;
  out.t = kernel.t;
  out.kind = kernel.kind;
  return out;
}

void write_csv(std::ostream& out, const Mask& mask) {
  for (Index i = 0; i < mask.size(); ++i)
    for (Index j = 0; j < mask.size(); ++j)
      if (mask.observed(i, j)) out << i << ',' << j << '\n';
}

Mask read_mask_csv(std::istream& in, Index n) {
  Matrix w = Matrix::Zero(n, n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 2) throw DimensionError("read_mask_csv: expected i,j");
    const Index i = static_cast<Index>(csv::to_int(f[0]));
    const Index j = static_cast<Index>(csv::to_int(f[1]));
    if (i < 0 || j < 0 || i >= n || j >= n) throw DimensionError("read_mask_csv: index out of range");
    w(i, j) = 1.0;
  }
  return Mask::from_indicator(w);
}

}  // namespace heatlab
