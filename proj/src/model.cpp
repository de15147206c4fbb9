#include "heatlab/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "heatlab/coherence.hpp"
#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"

namespace heatlab {

namespace {

Matrix activate(const Matrix& a, Activation kind) {
  return kind == Activation::tanh ? Matrix(a.array().tanh()) : Matrix(a.cwiseMax(0.0));
}

Matrix activation_slope(const Matrix& a, Activation kind) {
  if (kind == Activation::tanh) return (1.0 - a.array().tanh().square()).matrix();
  return (a.array() > 0.0).cast<double>().matrix();
}

std::string join(const std::vector<Index>& widths) {
  if (widths.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) s += (i ? "-" : "") + std::to_string(widths[i]);
  return s;
}

// Pre-activations of every layer; the input of layer l is act(pre[l-1]).
std::vector<Matrix> forward(const MlpState& net, const Matrix& x) {
  if (net.layers.empty()) throw PreconditionError("mlp: network has no layers");
  if (x.cols() != net.input_dim())
    throw DimensionError("mlp: input has " + std::to_string(x.cols()) + " columns, network expects " +
                         std::to_string(net.input_dim()));
  std::vector<Matrix> pre;
  pre.reserve(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Matrix in = l == 0 ? x : activate(pre.back(), net.activation);
    Matrix a = in * net.layers[l].weight;
    a.rowwise() += net.layers[l].bias.transpose();
    pre.push_back(std::move(a));
  }
  return pre;
}

}  // namespace

const char* to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

std::string MlpConfig::label() const { return "enc=" + join(encoder_widths) + ";head=" + join(head_widths); }

Index MlpState::parameter_count() const {
  Index total = 0;
  for (const auto& l : layers) total += l.weight.size() + l.bias.size();
  return total;
}

Index MlpState::head_parameter_count() const {
  Index total = 0;
  for (std::size_t l = static_cast<std::size_t>(backbone_layers); l < layers.size(); ++l)
    total += layers[l].weight.size() + layers[l].bias.size();
  return total;
}

MlpState mlp_init(const MlpConfig& cfg, Index input_dim) {
  if (cfg.encoder_widths.empty()) throw PreconditionError("mlp_init: encoder needs at least one layer");
  if (cfg.head_widths.size() > 4) throw PreconditionError("mlp_init: head depth is limited to 4");
  if (input_dim < 1) throw PreconditionError("mlp_init: input width must be positive");
  std::vector<Index> widths = cfg.encoder_widths;
  widths.insert(widths.end(), cfg.head_widths.begin(), cfg.head_widths.end());
  for (Index w : widths)
    if (w < 1) throw PreconditionError("mlp_init: layer widths must be positive");

  MlpState net;
  net.activation = cfg.activation;
  net.backbone_layers = static_cast<Index>(cfg.encoder_widths.size());
  std::mt19937_64 rng(cfg.seed);
  Index fan_in = input_dim;
  for (Index fan_out : widths) {
    const double s = cfg.init_scale / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-s, s);
    DenseLayer layer;
    layer.weight.resize(fan_in, fan_out);
    for (Index j = 0; j < fan_out; ++j)
      for (Index i = 0; i < fan_in; ++i) layer.weight(i, j) = u(rng);
    layer.bias = Vector::Zero(fan_out);
    net.layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return net;
}

MlpOutput mlp_embed(const MlpState& net, const Matrix& x) {
  const auto pre = forward(net, x);
  MlpOutput out;
  out.representations = pre[static_cast<std::size_t>(net.backbone_layers - 1)];
  out.embeddings = pre.back();
  return out;
}

std::vector<DenseLayer> mlp_backprop(const MlpState& net, const Matrix& x, const Matrix& embedding_gradient) {
  const auto pre = forward(net, x);
  if (embedding_gradient.rows() != x.rows() || embedding_gradient.cols() != net.output_dim())
    throw DimensionError("mlp_backprop: gradient shape does not match the network output");
  std::vector<DenseLayer> grads(net.layers.size());
  Matrix g = embedding_gradient;
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const Matrix in = l == 0 ? x : activate(pre[l - 1], net.activation);
    grads[l].weight = in.transpose() * g;
    grads[l].bias = g.colwise().sum().transpose();
    if (l > 0) g = (g * net.layers[l].weight.transpose()).cwiseProduct(activation_slope(pre[l - 1], net.activation));
  }
  return grads;
}

MlpTrainResult mlp_train(MlpState initial, const Matrix& inputs, const ObjectiveSpec& objective,
                         const TrainingTargets& targets, const SolverConfig& opt) {
  MlpTrainResult out;
  out.state = std::move(initial);
  for (int iter = 0;; ++iter) {
    const Matrix y = mlp_embed(out.state, inputs).embeddings;
    const LossValue loss = training_loss(objective, y, targets);
    if (!std::isfinite(loss.value) || !loss.gradient.allFinite())
      throw DivergenceError("mlp_train: loss became non-finite at iteration " + std::to_string(iter), iter);
    out.loss_history.push_back(loss.value);
    if (iter >= opt.max_iters) break;
    const auto grads = mlp_backprop(out.state, inputs, loss.gradient);
    const double eta = scheduled_step(opt, iter);
    for (std::size_t l = 0; l < grads.size(); ++l) {
      out.state.layers[l].weight -= eta * grads[l].weight;
      out.state.layers[l].bias -= eta * grads[l].bias;
    }
  }
  return out;
}

MlpTrainResult mlp_train(const MlpConfig& cfg, const ViewSet& views, const ObjectiveSpec& objective,
                         const PartialKernel& kernel, const SolverConfig& opt) {
  return mlp_train(mlp_init(cfg, views.views.cols()), views.views, objective, make_targets(views, kernel), opt);
}

ProbeResult linear_probe(const Matrix& features, const std::vector<int>& labels, const ProbeOptions& opt) {
  const Index n = features.rows();
  if (static_cast<Index>(labels.size()) != n) throw DimensionError("linear_probe: one label per row");
  if (n < 2) throw PreconditionError("linear_probe: need at least two samples");
  if (std::set<int>(labels.begin(), labels.end()).size() < 2)
    throw PreconditionError("linear_probe: need at least two classes");
  for (int l : labels)
    if (l < 0) throw PreconditionError("linear_probe: labels must be nonnegative");
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(opt.seed);
  std::shuffle(order.begin(), order.end(), rng);
  Index n_train = static_cast<Index>(std::llround(opt.train_fraction * static_cast<double>(n)));
  n_train = std::clamp<Index>(n_train, 1, n - 1);

  const Index d = features.cols();
  ProbeResult out;
  out.feature_mean = Vector::Zero(d);
  out.feature_scale = Vector::Ones(d);
  for (Index t = 0; t < n_train; ++t) out.feature_mean += features.row(order[static_cast<std::size_t>(t)]).transpose();
  out.feature_mean /= static_cast<double>(n_train);
  Vector var = Vector::Zero(d);
  for (Index t = 0; t < n_train; ++t)
    var += (features.row(order[static_cast<std::size_t>(t)]).transpose() - out.feature_mean).cwiseAbs2();
  var /= static_cast<double>(n_train);
  for (Index j = 0; j < d; ++j)
    if (var(j) > 1e-24) out.feature_scale(j) = std::sqrt(var(j));

  auto design = [&](Index begin, Index end) {
    Matrix x(end - begin, d + 1);
    for (Index t = begin; t < end; ++t) {
      const Index i = order[static_cast<std::size_t>(t)];
      x.row(t - begin).head(d) =
          ((features.row(i).transpose() - out.feature_mean).cwiseQuotient(out.feature_scale)).transpose();
      x(t - begin, d) = 1.0;
    }
    return x;
  };
  const Matrix x_train = design(0, n_train);
  const Matrix x_val = design(n_train, n);
  Matrix y_train = Matrix::Zero(n_train, classes);
  for (Index t = 0; t < n_train; ++t) y_train(t, labels[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])]) = 1.0;

  out.weights = Matrix::Zero(d + 1, classes);
  auto softmax = [](Matrix logits) {
    for (Index i = 0; i < logits.rows(); ++i) {
      logits.row(i).array() -= logits.row(i).maxCoeff();
      logits.row(i) = logits.row(i).array().exp().matrix();
      logits.row(i) /= logits.row(i).sum();
    }
    return logits;
  };
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    const Matrix p = softmax(x_train * out.weights);
    Matrix grad = x_train.transpose() * (p - y_train) / static_cast<double>(n_train);
    grad.topRows(d) += opt.l2 * out.weights.topRows(d);
    out.weights -= opt.step * grad;
  }

  auto accuracy = [&](const Matrix& x, Index begin) {
    const Matrix logits = x * out.weights;
    Index hits = 0;
    for (Index r = 0; r < logits.rows(); ++r) {
      Index best = 0;
      logits.row(r).maxCoeff(&best);
      if (best == labels[static_cast<std::size_t>(order[static_cast<std::size_t>(begin + r)])]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(logits.rows());
  };
  out.train_accuracy = accuracy(x_train, 0);
  out.validation_accuracy = accuracy(x_val, n_train);
  return out;
}

std::vector<StudyRow> proposition2_study(const std::vector<MlpConfig>& configs, const StudySetup& setup,
                                         const std::vector<std::uint64_t>& seeds, unsigned threads) {
  if (setup.views.labels.empty()) throw PreconditionError("proposition2_study: views need cluster labels");
  const TrainingTargets targets = make_targets(setup.views, setup.kernel);
  const std::size_t total = configs.size() * seeds.size();
  std::vector<StudyRow> rows(total);

  auto run_one = [&](std::size_t job) {
    MlpConfig cfg = configs[job / seeds.size()];
    cfg.seed = seeds[job % seeds.size()];
    SolverConfig train = setup.train;
    train.seed = cfg.seed;
    const MlpTrainResult trained =
        mlp_train(mlp_init(cfg, setup.views.views.cols()), setup.views.views, setup.objective, targets, train);
    const MlpOutput out = mlp_embed(trained.state, setup.views.views);

    StudyRow row;
    row.config = cfg.label();
    row.head_depth = cfg.head_depth();
    row.head_parameters = trained.state.head_parameter_count();
    row.seed = cfg.seed;
    row.mu_repr = incoherence(out.representations, out.representations.cols()).mu;
    row.mu_emb = incoherence(out.embeddings, out.embeddings.cols()).mu;
    ProbeOptions probe = setup.probe;
    probe.seed = cfg.seed;
    row.acc_repr = linear_probe(out.representations, setup.views.labels, probe).validation_accuracy;
    row.acc_emb = cfg.head_depth() == 0 ? row.acc_repr
                                        : linear_probe(out.embeddings, setup.views.labels, probe).validation_accuracy;
    rows[job] = std::move(row);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (workers == 1) {
    for (std::size_t job = 0; job < total; ++job) run_one(job);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t job; (job = next.fetch_add(1)) < total;) {
        try {
          run_one(job);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "config,seed,mu_repr,mu_emb,acc_repr,acc_emb\n";
  for (const auto& r : rows)
    out << r.config << ',' << r.seed << ',' << csv::number(r.mu_repr) << ',' << csv::number(r.mu_emb) << ','
        << csv::number(r.acc_repr) << ',' << csv::number(r.acc_emb) << '\n';
}

void write_state_csv(std::ostream& out, const MlpState& net) {
  out << "meta,1,2\n" << net.backbone_layers << ',' << (net.activation == Activation::tanh ? 1 : 0) << '\n';
  auto block = [&](const std::string& name, const Matrix& m) {
    out << name << ',' << m.rows() << ',' << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << csv::number(m(i, j));
      out << '\n';
    }
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    block("W" + std::to_string(l), net.layers[l].weight);
    block("b" + std::to_string(l), net.layers[l].bias.transpose());
  }
}

MlpState read_state_csv(std::istream& in) {
  auto read_block = [&](std::string& name) -> std::optional<Matrix> {
    std::string line;
    while (std::getline(in, line) && line.empty()) {
    }
    if (line.empty()) return std::nullopt;
    const auto h = csv::split(line);
    if (h.size() != 3) throw DimensionError("read_state_csv: bad block header '" + line + "'");
    name = h[0];
    const Index rows = static_cast<Index>(csv::to_int(h[1]));
    const Index cols = static_cast<Index>(csv::to_int(h[2]));
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) throw DimensionError("read_state_csv: truncated block " + name);
      const auto f = csv::split(line);
      if (static_cast<Index>(f.size()) != cols) throw DimensionError("read_state_csv: ragged block " + name);
      for (Index j = 0; j < cols; ++j) m(i, j) = csv::to_double(f[static_cast<std::size_t>(j)]);
    }
    return m;
  };

  std::string name;
  const auto meta = read_block(name);
  if (!meta || name != "meta" || meta->size() != 2) throw DimensionError("read_state_csv: missing meta block");
  MlpState net;
  net.backbone_layers = static_cast<Index>((*meta)(0, 0));
  net.activation = (*meta)(0, 1) == 1.0 ? Activation::tanh : Activation::relu;
  while (true) {
    const auto w = read_block(name);
    if (!w) break;
    if (name != "W" + std::to_string(net.layers.size())) throw DimensionError("read_state_csv: unexpected " + name);
    const auto b = read_block(name);
    if (!b || name != "b" + std::to_string(net.layers.size()) || b->rows() != 1 || b->cols() != w->cols())
      throw DimensionError("read_state_csv: bias block missing or misshapen");
    net.layers.push_back({*w, b->row(0).transpose()});
  }
  if (net.layers.empty() || net.backbone_layers < 1 || net.backbone_layers > static_cast<Index>(net.layers.size()))
    throw DimensionError("read_state_csv: inconsistent layer count");
  for (std::size_t l = 1; l < net.layers.size(); ++l)
    if (net.layers[l].weight.rows() != net.layers[l - 1].weight.cols())
      throw DimensionError("read_state_csv: layer shapes do not chain");
  return net;
}

}  // namespace heatlab
