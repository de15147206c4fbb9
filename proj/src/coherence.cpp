#include "heatlab/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"

namespace heatlab {

double basis_incoherence(const Matrix& u) {
  if (u.cols() < 1 || u.rows() < 1) throw DimensionError("basis_incoherence: empty basis");
  const double top = u.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(u.rows()) / static_cast<double>(u.cols()) * top;
}

IncoherenceResult incoherence(const Matrix& m, std::optional<Index> rank) {
  if (m.rows() < 1 || m.cols() < 1) throw DimensionError("incoherence: empty matrix");
  const auto s = svd(m);
  const Index full = s.singular_values.size();
  const double cutoff = 1e-10 * s.singular_values(0);
  Index numerical = 0;
  while (numerical < full && s.singular_values(numerical) > cutoff) ++numerical;

  const Index r = rank.value_or(numerical);
  if (r < 1 || r > full)
    throw PreconditionError("incoherence: rank " + std::to_string(r) + " outside [1, " + std::to_string(full) + "]");
  if (r > numerical)
    throw RankDeficiencyError("incoherence: sigma_" + std::to_string(r) + " is below the cutoff; numerical rank is " +
                                  std::to_string(numerical),
                              static_cast<long>(numerical));

  IncoherenceResult out;
  out.rank = r;
  out.mu_left = basis_incoherence(s.U.leftCols(r));
  out.mu_right = basis_incoherence(s.V.leftCols(r));
  out.mu = std::max(out.mu_left, out.mu_right);
  return out;
}

double sample_bound(BoundKind kind, const BoundInput& in, double n) {
  if (!(n > 1)) throw PreconditionError("sample_bound: n must exceed 1");
  const double log_n = std::log(n);
  const double side = in.side_coherence * in.side_rank;
  switch (kind) {
    case BoundKind::basic:
      return in.c0 * in.coherence * in.rank * log_n * log_n / n;
    case BoundKind::structured:
      return in.c0 * in.coherence * in.rank * side * std::log(side) * log_n / (n * n);
    case BoundKind::block:
      return in.c0 * side * std::log(side) * log_n / (n * in.min_cluster_size);
  }
  throw PreconditionError("sample_bound: unknown kind");
}

BoundCurve bound_curve(const BoundInput& in, std::int64_t first_epoch, std::int64_t last_epoch) {
  if (first_epoch < 1 || last_epoch < first_epoch) throw PreconditionError("bound_curve: empty epoch range");
  if (in.dataset_size < 1 || in.views < 1) throw PreconditionError("bound_curve: N and a must be positive");
  BoundCurve curve;
  const Fraction p = Fraction::reduced(1, in.dataset_size);
  for (std::int64_t e = first_epoch; e <= last_epoch; ++e) {
    BoundRow row;
    row.epochs = e;
    row.n = in.dataset_size * in.views * e;
    row.p_star = sample_bound(BoundKind::block, in, static_cast<double>(row.n));
    row.p = p;
    if (!curve.crossing_epoch && p.value() >= row.p_star) curve.crossing_epoch = e;
    curve.rows.push_back(row);
  }
  return curve;
}

std::vector<double> classes_linear_law(const BoundInput& in, double n, const std::vector<int>& classes) {
  std::vector<double> out;
  out.reserve(classes.size());
  for (int c : classes) {
    if (c < 1) throw PreconditionError("classes_linear_law: class count must be positive");
    BoundInput balanced = in;
    balanced.min_cluster_size = n / c;
    out.push_back(sample_bound(BoundKind::block, balanced, n) * n * n);
  }
  return out;
}

void write_csv(std::ostream& out, const BoundCurve& curve) {
  out << "epochs,n,p_star,p\n";
  for (const auto& r : curve.rows)
    out << r.epochs << ',' << r.n << ',' << csv::number(r.p_star) << ',' << csv::number(r.p.value()) << '\n';
}

}  // namespace heatlab
