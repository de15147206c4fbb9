#include "heatlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "heatlab/augment.hpp"
#include "heatlab/coherence.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/graph.hpp"
#include "heatlab/metrics.hpp"

namespace heatlab {

namespace {

ViewSet labeled_views(int classes, Index per_class, Index dim, double spread, Index views, Index epochs,
                      double jitter, std::uint64_t seed) {
  const Dataset data = gen_clusters(classes, std::vector<Index>(static_cast<std::size_t>(classes), per_class), dim,
                                    spread, seed);
  return gen_views(data, views, epochs, jitter, seed + 1);
}

double kmeans_purity(const Matrix& z, int k, const std::vector<int>& labels, std::uint64_t seed) {
  return purity(kmeans(z, k, seed).assignment, labels);
}

}  // namespace

Matrix standardize(const Matrix& x, double rms) {
  if (x.size() == 0) throw DimensionError("standardize: empty matrix");
  Matrix out = x.rowwise() - x.colwise().mean();
  const double current = std::sqrt(out.squaredNorm() / static_cast<double>(out.size()));
  if (current > 0) out *= rms / current;
  return out;
}

RecoveryReport spectral_recovery(const RecoveryScenario& s) {
  RecoveryReport out;
  out.views = labeled_views(s.classes, s.per_class, s.ambient_dim, s.spread, s.views, s.epochs, s.jitter, s.seed);
  const Index n = out.views.size();
  out.views.views = standardize(out.views.views, 1.0 / std::sqrt(static_cast<double>(n)));

  const Graph ideal = ideal_graph(out.views);
  const PartialKernel kernel = partial_kernel(heat_kernel(ideal, s.time), observation_mask(out.views));

  ObjectiveSpec objective;
  objective.kind = ObjectiveKind::trace;
  objective.penalties.mean = s.mean_penalty / static_cast<double>(n);
  MlpConfig encoder;
  encoder.encoder_widths = {s.dim};
  encoder.seed = s.seed + 2;
  SolverConfig cfg;
  cfg.max_iters = s.iters;
  cfg.step = s.step;
  cfg.tolerance = 0;
  cfg.seed = s.seed;

  FitResult fit = fit_embedding(out.views, kernel, objective, cfg, s.dim, encoder);
  out.embedding = std::move(fit.embedding);
  out.loss_history = std::move(fit.loss_history);

  const std::uint64_t km_seed = s.seed + 3;
  out.trained_purity = kmeans_purity(out.embedding.Z, s.classes, out.views.labels, km_seed);
  const MlpState untrained = mlp_init(encoder, out.views.views.cols());
  out.untrained_purity =
      kmeans_purity(mlp_embed(untrained, out.views.views).embeddings, s.classes, out.views.labels, km_seed);
  out.ideal_purity = kmeans_purity(spectral_embedding(ideal, s.dim).Z, s.classes, out.views.labels, km_seed);
  return out;
}

std::vector<CompletionPoint> completion_study(const CompletionScenario& s) {
  const ViewSet views = labeled_views(s.classes, s.per_class, s.classes, 1.0, 1, 1, 0.0, s.seed);
  const Matrix truth = truncate_kernel(heat_kernel(ideal_graph(views), s.time), s.rank);
  const Index n = truth.rows();

  SvtOptions options;
  options.solver.max_iters = s.iterations;
  options.solver.tolerance = 0;  // equal budget for every p

  std::vector<CompletionPoint> out;
  for (double p : s.probabilities) {
    const Mask mask = bernoulli_mask(n, p, s.seed);
    CompletionPoint pt;
    pt.p = p;
    pt.observed_fraction = mask.fraction().value();
    pt.result = svt_complete(apply_mask(truth, mask), mask, options);
    pt.error = (pt.result.X - truth).norm() / truth.norm();
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<DualityReport> duality_study(const DualityScenario& s) {
  std::mt19937_64 rng(s.seed);
  auto uniform_int = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<DualityReport> out;
  for (int inst = 0; inst < s.instances; ++inst) {
    Index origins = 0, a = 0, epochs = 0;
    do {
      origins = uniform_int(1, 6);
      a = uniform_int(1, 2);
      epochs = uniform_int(1, 3);
    } while (origins * a * epochs > s.max_n || origins * a * epochs < 2);

    Dataset data;
    data.points = Matrix::Zero(origins, 1);
    const ViewSet views = gen_views(data, a, epochs, 0.0, 0);
    const Index n = views.size();

    Matrix adjacency = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) adjacency(i, j) = adjacency(j, i) = 0.1 + unit(rng);
    const double t = 0.2 + 1.8 * unit(rng);
    const HeatKernel h = heat_kernel(Graph(adjacency), t, LaplacianKind::symmetric);
    const Mask mask = observation_mask(views);
    const Matrix observed = apply_mask(h.H, mask);

    SvtOptions options;
    options.solver.tolerance = s.svt_tolerance;
    options.solver.max_iters = s.svt_iters;
    const CompletionResult primal = svt_complete(observed, mask, options);

    const Index d = uniform_int(1, n);
    const auto eig = sym_eig(observed);
    const Matrix z = eig.eigenvectors.rightCols(d);
    out.push_back(duality_audit(primal, z, observed, mask, views.views_per_origin(), 1e-6));
  }
  return out;
}

std::vector<HadamardBound> hadamard_trials(const HadamardScenario& s) {
  std::mt19937_64 rng(s.seed);
  auto uniform_int = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<HadamardBound> out;
  out.reserve(static_cast<std::size_t>(s.trials));
  for (int trial = 0; trial < s.trials; ++trial) {
    const Index k = uniform_int(1, std::min<Index>(8, s.max_n));
    const Index groups = uniform_int(1, s.max_n / k);
    const Index n = groups * k;
    std::vector<Index> group(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) group[static_cast<std::size_t>(i)] = i / k;
    std::shuffle(group.begin(), group.end(), rng);

    const Index d = uniform_int(1, n);
    Matrix g(n, d);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
    out.push_back(hadamard_spectral_bound(Mask::from_groups(group), qr_orthonormalize(g)));
  }
  return out;
}

std::vector<StudyRow> head_depth_study(const HeadDepthScenario& s) {
  if (s.max_head_depth < 1 || s.seeds < 1) throw PreconditionError("head_depth_study: need depths >= 1 and seeds");
  ViewSet views =
      labeled_views(s.classes, s.per_class, s.ambient_dim, s.spread, s.views, s.epochs, s.jitter, s.data_seed);
  views.views = standardize(views.views, 1.0);
  const Graph ideal = ideal_graph(views);

  StudySetup setup{views, partial_kernel(heat_kernel(ideal, s.time), observation_mask(views)), {}, {}, {}};
  setup.objective.kind = s.objective;
  setup.objective.kappa = s.kappa;
  setup.objective.penalties.mean = 1.0 / static_cast<double>(views.size());
  setup.train.max_iters = s.iters;
  setup.train.step = s.step;
  setup.train.tolerance = 0;

  std::vector<MlpConfig> configs;
  for (Index depth = 0; depth <= s.max_head_depth; ++depth) {
    MlpConfig cfg;
    cfg.encoder_widths.assign(static_cast<std::size_t>(s.encoder_depth), s.width);
    cfg.head_widths.assign(static_cast<std::size_t>(depth), s.width);
    cfg.activation = s.activation;
    configs.push_back(cfg);
  }
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < s.seeds; ++i) seeds.push_back(s.first_seed + static_cast<std::uint64_t>(i));
  return proposition2_study(configs, setup, seeds, s.threads);
}

HeadDepthSummary summarize(const std::vector<StudyRow>& rows) {
  std::map<Index, std::vector<const StudyRow*>> by_depth;
  for (const auto& r : rows) by_depth[r.head_depth].push_back(&r);
  HeadDepthSummary out;
  std::vector<double> depth_values;
  for (const auto& [depth, group] : by_depth) {
    std::vector<double> mr, me, ar, ae;
    for (const StudyRow* r : group) {
      mr.push_back(r->mu_repr);
      me.push_back(r->mu_emb);
      ar.push_back(r->acc_repr);
      ae.push_back(r->acc_emb);
    }
    out.depths.push_back(depth);
    depth_values.push_back(static_cast<double>(depth));
    out.median_mu_repr.push_back(median(mr));
    out.median_mu_emb.push_back(median(me));
    out.median_acc_repr.push_back(median(ar));
    out.median_acc_emb.push_back(median(ae));
  }
  if (out.depths.size() >= 2) out.spearman_repr = spearman(depth_values, out.median_mu_repr);
  return out;
}

}  // namespace heatlab

namespace heatlab {

namespace {

void partitions(Index remaining, Index largest, std::vector<Index>& current, std::vector<std::vector<Index>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (Index part = std::min(remaining, largest); part >= 1; --part) {
    current.push_back(part);
    partitions(remaining - part, part, current, out);
    current.pop_back();
  }
}

CoherenceCase block_case(const std::vector<Index>& sizes, std::mt19937_64& rng) {
  Index n = 0;
  for (Index s : sizes) n += s;
  std::vector<Index> group;
  for (std::size_t b = 0; b < sizes.size(); ++b) group.insert(group.end(), static_cast<std::size_t>(sizes[b]), Index(b));
  std::shuffle(group.begin(), group.end(), rng);
  Matrix m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = group[static_cast<std::size_t>(i)] == group[static_cast<std::size_t>(j)];

  CoherenceCase c;
  c.kind = "block";
  for (std::size_t b = 0; b < sizes.size(); ++b) c.layout += (b ? "-" : "") + std::to_string(sizes[b]);
  c.rows = c.cols = n;
  c.rank = static_cast<Index>(sizes.size());
  const Index n_min = *std::min_element(sizes.begin(), sizes.end());
  c.expected = static_cast<double>(n) / static_cast<double>(c.rank * n_min);
  const IncoherenceResult r = incoherence(m);
  c.mu = r.mu;
  c.mu_left = r.mu_left;
  c.mu_right = r.mu_right;
  return c;
}

}  // namespace

std::vector<CoherenceCase> coherence_study(const CoherenceScenario& s) {
  std::mt19937_64 rng(s.seed);
  std::vector<CoherenceCase> out;

  for (Index n = 1; n <= s.max_partition_n; ++n) {
    std::vector<std::vector<Index>> all;
    std::vector<Index> current;
    partitions(n, n, current, all);
    for (const auto& sizes : all) out.push_back(block_case(sizes, rng));
  }
  // One layout per (n, r, n_min): a block of n_min, the rest spread evenly.
  for (Index n = s.max_partition_n + 1; n <= s.max_n; n += std::max<Index>(s.grid_step, 1)) {
    for (Index r = 1; r <= n; ++r)
      for (Index n_min = 1; n_min * r <= n; ++n_min) {
        std::vector<Index> sizes(static_cast<std::size_t>(r), n_min);
        for (Index extra = n - n_min * r, b = 1; extra > 0 && r > 1; --extra, b = b % (r - 1) + 1) ++sizes[static_cast<std::size_t>(b)];
        if (r == 1) sizes[0] = n;
        if (*std::min_element(sizes.begin(), sizes.end()) != n_min) continue;
        out.push_back(block_case(sizes, rng));
      }
  }

  for (Index n : {Index(1), Index(10), s.max_n}) {
    CoherenceCase c;
    c.kind = "constant";
    c.rows = c.cols = n;
    c.rank = 1;
    c.expected = 1.0;
    const IncoherenceResult r = incoherence(Matrix::Constant(n, n, 0.7));
    c.mu = r.mu;
    c.mu_left = r.mu_left;
    c.mu_right = r.mu_right;
    out.push_back(c);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform_int = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); };
  for (int t = 0; t < s.random_trials; ++t) {
    const Index rows = uniform_int(2, s.max_n);
    const Index cols = uniform_int(2, s.max_n);
    const Index rank = uniform_int(1, std::min(rows, cols));
    Matrix left(rows, rank), right(rank, cols);
    for (Index j = 0; j < rank; ++j)
      for (Index i = 0; i < rows; ++i) left(i, j) = gauss(rng);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rank; ++i) right(i, j) = gauss(rng);
    // Occasionally spike one row so the upper end of the range is exercised.
    if (t % 4 == 0) left.row(uniform_int(0, rows - 1)) *= 50.0;
    CoherenceCase c;
    c.kind = "random";
    c.rows = rows;
    c.cols = cols;
    c.rank = rank;
    c.expected = std::numeric_limits<double>::quiet_NaN();
    const IncoherenceResult r = incoherence(left * right, rank);
    c.mu = r.mu;
    c.mu_left = r.mu_left;
    c.mu_right = r.mu_right;
    out.push_back(c);
  }
  return out;
}

}  // namespace heatlab
