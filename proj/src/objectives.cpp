#include "heatlab/objectives.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "heatlab/errors.hpp"
#include "heatlab/graph.hpp"

namespace heatlab {

namespace {

double lookup(const std::vector<std::pair<std::string, double>>& terms, const std::string& name) {
  for (const auto& [key, value] : terms)
    if (key == name) return value;
  throw std::out_of_range("no loss term named '" + name + "'");
}

void require_unit_rows(const Matrix& z, const char* who) {
  for (Index i = 0; i < z.rows(); ++i)
    if (std::abs(z.row(i).norm() - 1.0) > 1e-8)
      throw PreconditionError(std::string(who) + ": row " + std::to_string(i) + " is not unit-norm");
}

// Row-wise log-sum-exp of kappa * G over the admissible columns, with the
// matching softmax weights (zero on an excluded diagonal).
void row_softmax(const Matrix& gram, double kappa, bool include_self, Index i, Vector& prob, double& lse) {
  const Index n = gram.cols();
  double top = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k)
    if (include_self || k != i) top = std::max(top, kappa * gram(i, k));
  prob.setZero(n);
  double sum = 0;
  for (Index k = 0; k < n; ++k) {
    if (!include_self && k == i) continue;
    prob(k) = std::exp(kappa * gram(i, k) - top);
    sum += prob(k);
  }
  prob /= sum;
  lse = top + std::log(sum);
}

}  // namespace

double LossValue::term(const std::string& name) const { return lookup(terms, name); }
double PairLossValue::term(const std::string& name) const { return lookup(terms, name); }

LossValue trace_objective(const Matrix& z, const Matrix& kernel, const TracePenalties& penalties) {
  const Index n = z.rows();
  const Index d = z.cols();
  if (kernel.rows() != n || kernel.cols() != n)
    throw DimensionError("trace_objective: kernel is " + std::to_string(kernel.rows()) + "x" +
                         std::to_string(kernel.cols()) + " but Z has " + std::to_string(n) + " rows");

  const Matrix kz = kernel * z;
  const double trace = z.cwiseProduct(kz).sum();

  const Matrix g = z.transpose() * z - Matrix::Identity(d, d);
  const double orth = g.squaredNorm();

  const Eigen::RowVectorXd s = z.colwise().sum();
  const double mean = s.squaredNorm();

  const Eigen::RowVectorXd norms = z.colwise().norm();
  double col = 0;
  Matrix col_grad = Matrix::Zero(n, d);
  for (Index j = 0; j < d; ++j) {
    col += (norms(j) - 1.0) * (norms(j) - 1.0);
    if (norms(j) > 0) col_grad.col(j) = 2.0 * (norms(j) - 1.0) / norms(j) * z.col(j);
  }

  LossValue out;
  out.value = trace - penalties.orthogonality * orth - penalties.mean * mean - penalties.column_norm * col;
  out.gradient = kz + kernel.transpose() * z;
  out.gradient -= penalties.orthogonality * 4.0 * (z * g);
  out.gradient -= penalties.mean * 2.0 * (Vector::Ones(n) * s);
  out.gradient -= penalties.column_norm * col_grad;
  out.terms = {{"trace", trace}, {"orthogonality", orth}, {"mean", mean}, {"column_norm", col}};
  return out;
}

double infonce_term(const Matrix& z, Index i, Index j, double kappa, bool include_self) {
  const Index n = z.rows();
  double top = -std::numeric_limits<double>::infinity();
  Vector s(n);
  for (Index k = 0; k < n; ++k) {
    s(k) = kappa * z.row(i).dot(z.row(k));
    if (include_self || k != i) top = std::max(top, s(k));
  }
  double sum = 0;
  for (Index k = 0; k < n; ++k)
    if (include_self || k != i) sum += std::exp(s(k) - top);
  return s(j) - (top + std::log(sum));
}

LossValue infonce(const Matrix& z, const PositivePairs& pairs, const InfoNceOptions& options) {
  if (!(options.kappa > 0)) throw PreconditionError("infonce: kappa must be positive");
  if (options.require_unit_rows) require_unit_rows(z, "infonce");
  const Index n = z.rows();
  const double kappa = options.kappa;
  const Matrix gram = z * z.transpose();

  // Number of ordered pairs leaving each row, and dL/dG accumulator.
  std::vector<int> uses(static_cast<std::size_t>(n), 0);
  Matrix dg = Matrix::Zero(n, n);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw DimensionError("infonce: invalid positive pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    ++uses[static_cast<std::size_t>(i)];
    ++uses[static_cast<std::size_t>(j)];
    dg(i, j) += kappa;
    dg(j, i) += kappa;
  }

  double total = 0;
  Vector prob;
  for (Index i = 0; i < n; ++i) {
    const int c = uses[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    double lse = 0;
    row_softmax(gram, kappa, options.include_self, i, prob, lse);
    total -= c * lse;
    dg.row(i) -= c * kappa * prob.transpose();
  }
  for (const auto& [i, j] : pairs) total += kappa * (gram(i, j) + gram(j, i));

  LossValue out;
  out.value = total;
  out.gradient = (dg + dg.transpose()) * z;
  out.terms = {{"pairs", static_cast<double>(pairs.size())}};
  return out;
}

Matrix infonce_matrix_form(const Matrix& z, double kappa,
                           const std::function<double(const Vector&, const Vector&)>& reweight) {
  if (!(kappa > 0)) throw PreconditionError("infonce_matrix_form: kappa must be positive");
  require_unit_rows(z, "infonce_matrix_form");
  const Index n = z.rows();
  Matrix a(n, n);
  if (reweight) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = reweight(z.row(i).transpose(), z.row(j).transpose());
  } else {
    a = (kappa * (z * z.transpose())).array().exp();
  }
  const Vector degree = a.rowwise().sum();
  const Matrix normalized = degree.cwiseInverse().asDiagonal() * a;
  return normalized.array().log();
}

Matrix matrix_log_near_identity(const Matrix& m) {
  const Index n = m.rows();
  if (m.cols() != n) throw DimensionError("matrix_log_near_identity: matrix must be square");
  const Matrix e = m - Matrix::Identity(n, n);
  if (n == 0) return e;
  const double radius = Eigen::EigenSolver<Matrix>(e, false).eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0))
    throw DomainError("matrix_log_near_identity: spectral radius of M - I is " + std::to_string(radius));

  Matrix sum = e;
  Matrix power = e;
  constexpr int kMaxTerms = 200000;
  for (int k = 2; k <= kMaxTerms; ++k) {
    power = power * e;
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    sum += (sign / k) * power;
    if (power.norm() / k <= 1e-18 * std::max(1.0, sum.norm())) return sum;
  }
  throw ConvergenceError("matrix_log_near_identity: series did not converge");
}

double laplacian_expansion_residual(const Matrix& m) {
  const Index n = m.rows();
  if (m.cols() != n) throw DimensionError("laplacian_expansion_residual: matrix must be square");
  for (Index i = 0; i < n; ++i)
    if (std::abs(m.row(i).sum() - 1.0) > 1e-8)
      throw PreconditionError("laplacian_expansion_residual: matrix is not row-stochastic");
  return (matrix_log_near_identity(m) - (m - Matrix::Identity(n, n))).norm();
}

PairLossValue barlow_twins(const Matrix& za, const Matrix& zb, double alpha) {
  if (za.rows() != zb.rows() || za.cols() != zb.cols())
    throw DimensionError("barlow_twins: argument shapes differ");
  const Index d = za.cols();
  const Eigen::RowVectorXd na = za.colwise().norm();
  const Eigen::RowVectorXd nb = zb.colwise().norm();
  for (Index j = 0; j < d; ++j)
    if (na(j) == 0.0 || nb(j) == 0.0)
      throw DomainError("barlow_twins: column " + std::to_string(j) + " has zero norm");

  const Matrix a = za * na.cwiseInverse().asDiagonal();
  const Matrix b = zb * nb.cwiseInverse().asDiagonal();
  const Matrix c = a.transpose() * b;

  double diag = 0;
  double off = 0;
  Matrix dc(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      if (i == j) {
        diag += (c(i, i) - 1.0) * (c(i, i) - 1.0);
        dc(i, i) = 2.0 * (c(i, i) - 1.0);
      } else {
        off += c(i, j) * c(i, j);
        dc(i, j) = 2.0 * alpha * c(i, j);
      }
    }

  const Matrix da = b * dc.transpose();
  const Matrix db = a * dc;
  auto through_norm = [](const Matrix& unit, const Matrix& up, const Eigen::RowVectorXd& norms) {
    Matrix g(unit.rows(), unit.cols());
    for (Index j = 0; j < unit.cols(); ++j)
      g.col(j) = (up.col(j) - unit.col(j) * unit.col(j).dot(up.col(j))) / norms(j);
    return g;
  };

  PairLossValue out;
  out.value = diag + alpha * off;
  out.gradient_a = through_norm(a, da, na);
  out.gradient_b = through_norm(b, db, nb);
  out.terms = {{"diagonal", diag}, {"off_diagonal", off}};
  return out;
}

LossValue vicreg(const Matrix& z, const Matrix& adjacency, const VicregWeights& weights) {
  const Index n = z.rows();
  const Index d = z.cols();
  if (adjacency.rows() != n || adjacency.cols() != n)
    throw DimensionError("vicreg: adjacency does not match Z");
  if (!is_symmetric(adjacency)) throw SymmetryError("vicreg: adjacency must be symmetric");
  if ((adjacency.array() < 0).any()) throw DomainError("vicreg: adjacency must be nonnegative");

  const Matrix c = z.transpose() * z;

  double var = 0;
  Matrix var_grad = Matrix::Zero(n, d);
  for (Index k = 0; k < d; ++k) {
    const double s = std::sqrt(c(k, k));
    if (s < 1.0) {
      var += 1.0 - s;
      if (s > 0) var_grad.col(k) = -z.col(k) / s;
    }
  }

  Matrix off = c;
  off.diagonal().setZero();
  const double cov = off.squaredNorm();

  Matrix lap = -adjacency;
  lap.diagonal() += adjacency.rowwise().sum();
  const Matrix lz = lap * z;
  const double inv = 2.0 * z.cwiseProduct(lz).sum();

  LossValue out;
  out.value = weights.variance * var + weights.covariance * cov + weights.invariance * inv;
  out.gradient = weights.variance * var_grad + weights.covariance * 4.0 * (z * off) +
                 weights.invariance * 4.0 * lz;
  out.terms = {{"variance", var}, {"covariance", cov}, {"invariance", inv}};
  return out;
}

PositivePairs positive_pairs(const ViewSet& views) {
  PositivePairs pairs;
  const Index k = views.views_per_origin();
  for (Index o = 0; o < views.num_origins; ++o)
    for (Index i = 0; i < k; ++i)
      for (Index j = i + 1; j < k; ++j) pairs.emplace_back(o * k + i, o * k + j);
  return pairs;
}

Matrix normalize_rows(const Matrix& y) {
  Matrix u = y;
  for (Index i = 0; i < y.rows(); ++i) {
    const double r = y.row(i).norm();
    if (r == 0.0) throw DomainError("normalize_rows: row " + std::to_string(i) + " is zero");
    u.row(i) /= r;
  }
  return u;
}

Matrix normalize_rows_backward(const Matrix& y, const Matrix& upstream) {
  Matrix g(y.rows(), y.cols());
  for (Index i = 0; i < y.rows(); ++i) {
    const double r = y.row(i).norm();
    const Eigen::RowVectorXd u = y.row(i) / r;
    g.row(i) = (upstream.row(i) - u * u.dot(upstream.row(i))) / r;
  }
  return g;
}

const char* to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::trace:
      return "trace";
    case ObjectiveKind::infonce:
      return "infonce";
    case ObjectiveKind::barlow_twins:
      return "barlow_twins";
    case ObjectiveKind::vicreg:
      return "vicreg";
  }
  return "?";
}

std::optional<ObjectiveKind> parse_objective_kind(const std::string& name) {
  if (name == "trace") return ObjectiveKind::trace;
  if (name == "infonce" || name == "simclr") return ObjectiveKind::infonce;
  if (name == "barlow_twins" || name == "barlow") return ObjectiveKind::barlow_twins;
  if (name == "vicreg") return ObjectiveKind::vicreg;
  return std::nullopt;
}

TrainingTargets make_targets(const ViewSet& views, const PartialKernel& kernel) {
  if (kernel.observed.rows() != views.size())
    throw DimensionError("make_targets: kernel size does not match the view count");
  TrainingTargets t;
  t.kernel = kernel.observed;
  t.pairs = positive_pairs(views);
  if (views.views_per_epoch >= 2) {
    for (Index o = 0; o < views.num_origins; ++o)
      for (Index e = 0; e < views.epochs; ++e) {
        t.rows_a.push_back(views.row(o, e, 0));
        t.rows_b.push_back(views.row(o, e, 1));
      }
  }
  t.adjacency = view_graph(views).adjacency();
  return t;
}

LossValue training_loss(const ObjectiveSpec& spec, const Matrix& y, const TrainingTargets& targets) {
  LossValue out;
  switch (spec.kind) {
    case ObjectiveKind::trace: {
      out = trace_objective(y, targets.kernel, spec.penalties);
      out.value = -out.value;
      out.gradient = -out.gradient;
      return out;
    }
    case ObjectiveKind::infonce: {
      const Matrix u = normalize_rows(y);
      out = infonce(u, targets.pairs, {.kappa = spec.kappa, .include_self = true, .require_unit_rows = false});
      out.value = -out.value;
      out.gradient = normalize_rows_backward(y, -out.gradient);
      return out;
    }
    case ObjectiveKind::barlow_twins: {
      if (targets.rows_a.empty()) throw PreconditionError("training_loss: barlow twins needs a >= 2 views");
      const Index m = static_cast<Index>(targets.rows_a.size());
      Matrix za(m, y.cols());
      Matrix zb(m, y.cols());
      for (Index i = 0; i < m; ++i) {
        za.row(i) = y.row(targets.rows_a[static_cast<std::size_t>(i)]);
        zb.row(i) = y.row(targets.rows_b[static_cast<std::size_t>(i)]);
      }
      const PairLossValue pv = barlow_twins(za, zb, spec.alpha);
      out.value = pv.value;
      out.terms = pv.terms;
      out.gradient = Matrix::Zero(y.rows(), y.cols());
      for (Index i = 0; i < m; ++i) {
        out.gradient.row(targets.rows_a[static_cast<std::size_t>(i)]) += pv.gradient_a.row(i);
        out.gradient.row(targets.rows_b[static_cast<std::size_t>(i)]) += pv.gradient_b.row(i);
      }
      return out;
    }
    case ObjectiveKind::vicreg:
      return vicreg(y, targets.adjacency, spec.vicreg);
  }
  throw PreconditionError("training_loss: unknown objective");
}

}  // namespace heatlab
