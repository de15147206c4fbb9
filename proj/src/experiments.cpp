#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli_experiments.hpp"
#include "heatlab/coherence.hpp"
#include "heatlab/csv.hpp"
#include "heatlab/gradcheck.hpp"
#include "heatlab/plot.hpp"
#include "heatlab/scenarios.hpp"

namespace heatlab::cli {

void RunContext::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
  body(out);
  if (!out) throw std::runtime_error("write failed for " + (dir_ / name).string());
  manifest_.outputs.push_back(name);
}

void RunContext::check(const std::string& name, bool passed, const std::string& detail) {
  manifest_.checks.push_back({name, passed, detail});
}

void RunContext::result(const std::string& key, const std::string& value) { manifest_.results[key] = value; }
void RunContext::result(const std::string& key, double value) { manifest_.results[key] = csv::number(value); }

namespace {

using csv::number;

// Short rendering for check details and result keys.
std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Index index_of(const ExperimentConfig& c, const std::string& key) { return static_cast<Index>(c.integer(key)); }
int int_of(const ExperimentConfig& c, const std::string& key) { return static_cast<int>(c.integer(key)); }
std::uint64_t seed_of(const ExperimentConfig& c, const std::string& key) {
  return static_cast<std::uint64_t>(c.integer(key));
}

Activation activation_of(const ExperimentConfig& c) {
  const std::string a = c.text("activation");
  if (a == "tanh") return Activation::tanh;
  if (a == "relu") return Activation::relu;
  throw UsageError("activation must be tanh or relu, got '" + a + "'");
}

ObjectiveKind objective_of(const ExperimentConfig& c) {
  const auto kind = parse_objective_kind(c.text("objective"));
  if (!kind) throw UsageError("unknown objective '" + c.text("objective") + "'");
  return *kind;
}

// spectral -------------------------------------------------------------------

void run_spectral(const ExperimentConfig& c, RunContext& ctx) {
  RecoveryScenario s;
  s.classes = int_of(c, "classes");
  s.per_class = index_of(c, "per_class");
  s.ambient_dim = index_of(c, "ambient_dim");
  s.spread = c.number("spread");
  s.views = index_of(c, "views");
  s.epochs = index_of(c, "epochs");
  s.jitter = c.number("jitter");
  s.time = c.number("time");
  s.dim = index_of(c, "dim");
  s.iters = int_of(c, "iters");
  s.step = c.number("step");
  s.mean_penalty = c.number("mean_penalty");
  s.seed = seed_of(c, "seed");
  const RecoveryReport r = spectral_recovery(s);

  ctx.write("embedding.csv", [&](std::ostream& out) {
    out << "origin,label";
    for (Index j = 0; j < r.embedding.dim(); ++j) out << ",z" << j;
    out << '\n';
    for (Index i = 0; i < r.embedding.rows(); ++i) {
      out << r.views.origins[static_cast<std::size_t>(i)] << ',' << r.views.labels[static_cast<std::size_t>(i)];
      for (Index j = 0; j < r.embedding.dim(); ++j) out << ',' << number(r.embedding.Z(i, j));
      out << '\n';
    }
  });
  ctx.write("loss.csv", [&](std::ostream& out) {
    out << "iter,loss\n";
    for (std::size_t i = 0; i < r.loss_history.size(); ++i) out << i << ',' << number(r.loss_history[i]) << '\n';
  });
  ctx.write("summary.csv", [&](std::ostream& out) {
    out << "trained_purity,untrained_purity,ideal_purity,final_loss\n"
        << number(r.trained_purity) << ',' << number(r.untrained_purity) << ',' << number(r.ideal_purity) << ','
        << number(r.loss_history.empty() ? NAN : r.loss_history.back()) << '\n';
  });

  const bool finite = std::all_of(r.loss_history.begin(), r.loss_history.end(), [](double v) { return std::isfinite(v); });
  ctx.check("trained purity >= 0.95", r.trained_purity >= 0.95, "purity " + brief(r.trained_purity));
  ctx.check("trained purity within 0.05 of the ideal spectral embedding",
            std::abs(r.trained_purity - r.ideal_purity) <= 0.05, "ideal " + brief(r.ideal_purity));
  ctx.check("loss history finite", finite && !r.loss_history.empty());
  ctx.result("trained_purity", r.trained_purity);
  ctx.result("untrained_purity", r.untrained_purity);
  ctx.result("ideal_purity", r.ideal_purity);
}

// duality --------------------------------------------------------------------

void run_duality(const ExperimentConfig& c, RunContext& ctx) {
  DualityScenario d;
  d.instances = int_of(c, "instances");
  d.max_n = index_of(c, "max_n");
  d.seed = seed_of(c, "seed");
  d.svt_tolerance = c.number("svt_tolerance");
  d.svt_iters = int_of(c, "svt_iters");
  HadamardScenario h;
  h.trials = int_of(c, "trials");
  h.max_n = index_of(c, "trial_max_n");
  h.seed = d.seed + 1;

  const auto reports = duality_study(d);
  const auto bounds = hadamard_trials(h);

  ctx.write("duality.csv", [&](std::ostream& out) {
    out << "instance,feasible,weak_duality,";
    write_csv_header(out, static_cast<const DualityReport*>(nullptr));
    for (std::size_t i = 0; i < reports.size(); ++i) {
      out << i << ',' << reports[i].feasible << ',' << reports[i].weak_duality << ',';
      write_csv_row(out, reports[i]);
    }
  });
  ctx.write("hadamard.csv", [&](std::ostream& out) {
    out << "trial,k,sigma1,sqrtK,holds\n";
    for (std::size_t i = 0; i < bounds.size(); ++i)
      out << i << ',' << bounds[i].k << ',' << number(bounds[i].sigma1) << ',' << number(bounds[i].sqrt_k) << ','
          << bounds[i].holds() << '\n';
  });

  int infeasible = 0;
  double min_gap = INFINITY;
  for (const auto& r : reports) {
    if (!r.feasible) ++infeasible;
    min_gap = std::min(min_gap, r.gap);
  }
  double worst = -INFINITY;
  int violations = 0;
  for (const auto& b : bounds) {
    worst = std::max(worst, b.sigma1 - b.sqrt_k);
    if (!b.holds()) ++violations;
  }
  ctx.check("every duality instance feasible", infeasible == 0, std::to_string(infeasible) + " infeasible");
  ctx.check("weak duality gap >= -1e-8", min_gap >= -1e-8, "min gap " + brief(min_gap));
  ctx.check("sigma_1(W o ZZ^T) <= sqrt(K)", violations == 0, "worst excess " + brief(worst));
  ctx.result("min_gap", min_gap);
  ctx.result("worst_sigma_excess", worst);
}

// complete -------------------------------------------------------------------

void run_complete(const ExperimentConfig& c, RunContext& ctx) {
  CompletionScenario s;
  s.classes = int_of(c, "classes");
  s.per_class = index_of(c, "per_class");
  s.time = c.number("time");
  s.rank = index_of(c, "rank");
  s.probabilities = c.numbers("probabilities");
  s.iterations = int_of(c, "iterations");
  s.seed = seed_of(c, "seed");
  std::sort(s.probabilities.begin(), s.probabilities.end());
  const auto points = completion_study(s);

  ctx.write("completion.csv", [&](std::ostream& out) {
    out << "p,observed_fraction,error,";
    write_csv_header(out, static_cast<const CompletionResult*>(nullptr));
    for (const auto& pt : points) {
      out << number(pt.p) << ',' << number(pt.observed_fraction) << ',' << number(pt.error) << ',';
      write_csv_row(out, pt.result);
    }
  });

  bool accurate = true;
  bool monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].p >= 0.6 && points[i].error > 1e-3) accurate = false;
    if (i > 0 && points[i].error > points[i - 1].error) monotone = false;
    detail += (i ? " " : "") + brief(points[i].p) + ":" + brief(points[i].error);
    ctx.result("error_p" + brief(points[i].p), points[i].error);
  }
  ctx.check("relative error <= 1e-3 for p >= 0.6", accurate, detail);
  ctx.check("error non-increasing in p", monotone, detail);
}

// bound ----------------------------------------------------------------------

void run_bound(const ExperimentConfig& c, RunContext& ctx) {
  BoundInput in;
  in.dataset_size = c.integer("dataset_size");
  in.min_cluster_size = c.number("min_cluster_size");
  in.views = c.integer("views");
  in.side_coherence = c.number("side_coherence");
  in.side_rank = c.number("side_rank");
  in.c0 = c.number("c0");
  const BoundCurve curve = bound_curve(in, c.integer("first_epoch"), c.integer("last_epoch"));

  ctx.write("bound.csv", [&](std::ostream& out) { write_csv(out, curve); });
  Series p_star{"block bound p*", {}, {}};
  Series p{"protocol p = 1/N", {}, {}};
  for (const auto& r : curve.rows) {
    p_star.x.push_back(static_cast<double>(r.epochs));
    p_star.y.push_back(r.p_star);
    p.x.push_back(static_cast<double>(r.epochs));
    p.y.push_back(r.p.value());
  }
  PlotOptions opt;
  opt.title = "Sampling requirement against epochs";
  opt.x_label = "epochs";
  opt.y_label = "probability";
  opt.log_y = true;
  ctx.write("bound.svg", [&](std::ostream& out) { out << render_svg({p_star, p}, PlotStyle::line, opt); });

  bool decreasing = true;
  bool exact = true;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    if (i > 0 && !(curve.rows[i].p_star < curve.rows[i - 1].p_star)) decreasing = false;
    if (!(curve.rows[i].p == Fraction::reduced(1, in.dataset_size))) exact = false;
  }
  ctx.check("p* strictly decreasing in epochs", decreasing);
  ctx.check("protocol fraction exactly 1/N", exact);
  ctx.result("crossing_epoch", curve.crossing_epoch ? std::to_string(*curve.crossing_epoch) : "none");
  if (!curve.rows.empty()) {
    ctx.result("p_star_first", curve.rows.front().p_star);
    ctx.result("p_star_last", curve.rows.back().p_star);
  }
}

// coherence ------------------------------------------------------------------

void run_coherence(const ExperimentConfig& c, RunContext& ctx) {
  CoherenceScenario s;
  s.max_partition_n = index_of(c, "max_partition_n");
  s.max_n = index_of(c, "max_n");
  s.grid_step = index_of(c, "grid_step");
  s.random_trials = int_of(c, "random_trials");
  s.seed = seed_of(c, "seed");
  const auto cases = coherence_study(s);

  ctx.write("coherence.csv", [&](std::ostream& out) {
    out << "kind,layout,rows,cols,rank,mu,expected,mu_left,mu_right\n";
    for (const auto& k : cases)
      out << k.kind << ',' << k.layout << ',' << k.rows << ',' << k.cols << ',' << k.rank << ',' << number(k.mu) << ','
          << (std::isnan(k.expected) ? std::string() : number(k.expected)) << ',' << number(k.mu_left) << ','
          << number(k.mu_right) << '\n';
  });

  double worst_closed = 0;
  double worst_sym = 0;
  int closed = 0;
  int out_of_range = 0;
  for (const auto& k : cases) {
    const double r = static_cast<double>(k.rank);
    const double slack = 1e-12;
    if (k.mu_left < 1 - slack || k.mu_right < 1 - slack || k.mu_left > k.rows / r * (1 + slack) ||
        k.mu_right > k.cols / r * (1 + slack))
      ++out_of_range;
    if (!std::isnan(k.expected)) {
      ++closed;
      worst_closed = std::max(worst_closed, std::abs(k.mu - k.expected) / k.expected);
      worst_sym = std::max(worst_sym, std::abs(k.mu_left - k.mu_right));
    }
  }
  ctx.check("closed forms within 1e-9 relative", worst_closed <= 1e-9,
            std::to_string(closed) + " cases, worst " + brief(worst_closed));
  ctx.check("1 <= mu <= n/r on each side", out_of_range == 0, std::to_string(out_of_range) + " out of range");
  ctx.check("symmetric inputs have equal sides within 1e-10", worst_sym <= 1e-10, "worst " + brief(worst_sym));
  ctx.result("cases", std::to_string(cases.size()));
  ctx.result("worst_closed_form_error", worst_closed);
}

// prop2 ----------------------------------------------------------------------

void run_prop2(const ExperimentConfig& c, RunContext& ctx) {
  HeadDepthScenario s;
  s.classes = int_of(c, "classes");
  s.per_class = index_of(c, "per_class");
  s.ambient_dim = index_of(c, "ambient_dim");
  s.spread = c.number("spread");
  s.views = index_of(c, "views");
  s.epochs = index_of(c, "epochs");
  s.jitter = c.number("jitter");
  s.time = c.number("time");
  s.width = index_of(c, "width");
  s.encoder_depth = index_of(c, "encoder_depth");
  s.max_head_depth = index_of(c, "max_head_depth");
  s.activation = activation_of(c);
  s.objective = objective_of(c);
  s.kappa = c.number("kappa");
  s.iters = int_of(c, "iters");
  s.step = c.number("step");
  s.seeds = int_of(c, "seeds");
  s.first_seed = seed_of(c, "seed");
  s.data_seed = seed_of(c, "data_seed");
  s.threads = static_cast<unsigned>(std::max<long long>(1, c.integer("threads")));

  const auto rows = head_depth_study(s);
  const HeadDepthSummary sum = summarize(rows);

  ctx.write("prop2.csv", [&](std::ostream& out) { write_csv(out, rows); });
  ctx.write("prop2_summary.csv", [&](std::ostream& out) {
    out << "head_depth,median_mu_repr,median_mu_emb,median_acc_repr,median_acc_emb\n";
    for (std::size_t i = 0; i < sum.depths.size(); ++i)
      out << sum.depths[i] << ',' << number(sum.median_mu_repr[i]) << ',' << number(sum.median_mu_emb[i]) << ','
          << number(sum.median_acc_repr[i]) << ',' << number(sum.median_acc_emb[i]) << '\n';
  });
  Series repr{"representation", {}, {}};
  Series emb{"embedding", {}, {}};
  for (const auto& r : rows) {
    repr.x.push_back(static_cast<double>(r.head_depth) - 0.08);
    repr.y.push_back(r.mu_repr);
    emb.x.push_back(static_cast<double>(r.head_depth) + 0.08);
    emb.y.push_back(r.mu_emb);
  }
  PlotOptions opt;
  opt.title = "Incoherence against projection-head depth";
  opt.x_label = "head depth";
  opt.y_label = "incoherence";
  ctx.write("prop2.svg", [&](std::ostream& out) { out << render_svg({repr, emb}, PlotStyle::scatter, opt); });

  bool depth0 = true;
  for (const auto& r : rows)
    if (r.head_depth == 0 && std::abs(r.mu_repr - r.mu_emb) > 1e-12 * std::max(1.0, r.mu_repr)) depth0 = false;
  bool deeper = true;
  std::string detail;
  for (std::size_t i = 0; i < sum.depths.size(); ++i) {
    if (sum.depths[i] >= 2 && !(sum.median_mu_emb[i] > sum.median_mu_repr[i])) deeper = false;
    detail += (i ? " " : "") + std::to_string(sum.depths[i]) + ":" + brief(sum.median_mu_repr[i]) + "/" +
              brief(sum.median_mu_emb[i]);
  }
  ctx.check("depth 0 embeddings equal representations", depth0);
  ctx.check("median embedding incoherence above representation at depth >= 2", deeper, detail);
  ctx.check("representation incoherence decreases with depth (Spearman < 0)", sum.spearman_repr < 0,
            "rho " + brief(sum.spearman_repr));
  ctx.result("spearman_repr", sum.spearman_repr);
}

// gradcheck ------------------------------------------------------------------

void run_gradcheck(const ExperimentConfig& c, RunContext& ctx) {
  const auto checks = gradient_suite(int_of(c, "points"), seed_of(c, "seed"));
  ctx.write("gradcheck.csv", [&](std::ostream& out) {
    out << "loss,points,max_relative_error,tolerance,passed\n";
    for (const auto& g : checks)
      out << g.name << ',' << g.points << ',' << number(g.max_relative_error) << ',' << number(g.tolerance) << ','
          << g.passed() << '\n';
  });
  for (const auto& g : checks) {
    ctx.check(g.name + " gradient", g.passed(), "max relative error " + brief(g.max_relative_error));
    ctx.result(g.name + "_max_relative_error", g.max_relative_error);
  }
}

std::map<std::string, std::string> spectral_defaults() {
  const RecoveryScenario s;
  return {{"classes", std::to_string(s.classes)},   {"per_class", std::to_string(s.per_class)},
          {"ambient_dim", std::to_string(s.ambient_dim)}, {"spread", number(s.spread)},
          {"views", std::to_string(s.views)},       {"epochs", std::to_string(s.epochs)},
          {"jitter", number(s.jitter)},             {"time", number(s.time)},
          {"dim", std::to_string(s.dim)},           {"iters", std::to_string(s.iters)},
          {"step", number(s.step)},                 {"mean_penalty", number(s.mean_penalty)},
          {"seed", std::to_string(s.seed)}};
}

std::map<std::string, std::string> duality_defaults() {
  const DualityScenario d;
  const HadamardScenario h;
  return {{"instances", std::to_string(d.instances)}, {"max_n", std::to_string(d.max_n)},
          {"seed", std::to_string(d.seed)},           {"svt_tolerance", number(d.svt_tolerance)},
          {"svt_iters", std::to_string(d.svt_iters)}, {"trials", std::to_string(h.trials)},
          {"trial_max_n", std::to_string(h.max_n)}};
}

std::map<std::string, std::string> complete_defaults() {
  const CompletionScenario s;
  std::string probs;
  for (std::size_t i = 0; i < s.probabilities.size(); ++i) probs += (i ? "," : "") + number(s.probabilities[i]);
  return {{"classes", std::to_string(s.classes)}, {"per_class", std::to_string(s.per_class)},
          {"time", number(s.time)},               {"rank", std::to_string(s.rank)},
          {"probabilities", probs},               {"iterations", std::to_string(s.iterations)},
          {"seed", std::to_string(s.seed)}};
}

std::map<std::string, std::string> bound_defaults() {
  const BoundInput in;
  return {{"dataset_size", std::to_string(in.dataset_size)}, {"min_cluster_size", number(in.min_cluster_size)},
          {"views", std::to_string(in.views)},               {"side_coherence", number(in.side_coherence)},
          {"side_rank", number(in.side_rank)},               {"c0", number(in.c0)},
          {"first_epoch", "1"},                              {"last_epoch", "1000"}};
}

std::map<std::string, std::string> coherence_defaults() {
  const CoherenceScenario s;
  return {{"max_partition_n", std::to_string(s.max_partition_n)}, {"max_n", std::to_string(s.max_n)},
          {"grid_step", std::to_string(s.grid_step)},             {"random_trials", std::to_string(s.random_trials)},
          {"seed", std::to_string(s.seed)}};
}

std::map<std::string, std::string> prop2_defaults() {
  const HeadDepthScenario s;
  return {{"classes", std::to_string(s.classes)},
          {"per_class", std::to_string(s.per_class)},
          {"ambient_dim", std::to_string(s.ambient_dim)},
          {"spread", number(s.spread)},
          {"views", std::to_string(s.views)},
          {"epochs", std::to_string(s.epochs)},
          {"jitter", number(s.jitter)},
          {"time", number(s.time)},
          {"width", std::to_string(s.width)},
          {"encoder_depth", std::to_string(s.encoder_depth)},
          {"max_head_depth", std::to_string(s.max_head_depth)},
          {"activation", to_string(s.activation)},
          {"objective", "infonce"},
          {"kappa", number(s.kappa)},
          {"iters", std::to_string(s.iters)},
          {"step", number(s.step)},
          {"seeds", std::to_string(s.seeds)},
          {"seed", std::to_string(s.first_seed)},
          {"data_seed", std::to_string(s.data_seed)},
          {"threads", "4"}};
}

}  // namespace

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> all{
      {"spectral", "trace-objective encoder recovers the ideal clusters", spectral_defaults(), run_spectral},
      {"duality", "weak duality and the Hadamard spectral bound", duality_defaults(), run_duality},
      {"complete", "SVT recovery of a low-rank heat kernel", complete_defaults(), run_complete},
      {"bound", "block sample bound against the protocol fraction", bound_defaults(), run_bound},
      {"coherence", "incoherence against closed forms and bounds", coherence_defaults(), run_coherence},
      {"prop2", "incoherence of representations vs embeddings over head depth", prop2_defaults(), run_prop2},
      {"gradcheck", "finite-difference check of every analytic gradient", {{"points", "100"}, {"seed", "5"}},
       run_gradcheck},
  };
  return all;
}

const Experiment* find_experiment(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace heatlab::cli
