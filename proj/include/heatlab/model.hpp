#pragma once

// Small fully connected encoder + projection head with manual backprop, and
// a multinomial logistic-regression probe.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatlab/augment.hpp"
#include "heatlab/dataset.hpp"
#include "heatlab/linalg.hpp"
#include "heatlab/objectives.hpp"
#include "heatlab/solver_config.hpp"

namespace heatlab {

enum class Activation { relu, tanh };

const char* to_string(Activation a);

/// Layer widths exclude the input width, which comes from the data.
///
/// The encoder's last layer is linear and its output is the representation.
/// Each head layer applies the activation to its input and then an affine
/// map, so a head of depth 0 makes embeddings equal representations.
struct MlpConfig {
  std::vector<Index> encoder_widths;
  std::vector<Index> head_widths;
  Activation activation = Activation::tanh;
  std::uint64_t seed = 0;
  double init_scale = 1.0;

  Index head_depth() const { return static_cast<Index>(head_widths.size()); }
  /// e.g. "enc=32-16;head=16-8" (no commas, safe as a CSV field).
  std::string label() const;
};

struct DenseLayer {
  Matrix weight;  // fan_in x fan_out, y = x W + b
  Vector bias;
};

struct MlpState {
  std::vector<DenseLayer> layers;
  Index backbone_layers = 0;  // layers [0, backbone_layers) form the encoder
  Activation activation = Activation::tanh;

  Index input_dim() const { return layers.front().weight.rows(); }
  Index output_dim() const { return layers.back().weight.cols(); }
  Index parameter_count() const;
  Index head_parameter_count() const;
};

/// Uniform fan-in initialization: U(-s, s) with s = init_scale / sqrt(fan_in).
MlpState mlp_init(const MlpConfig& cfg, Index input_dim);

struct MlpOutput {
  Matrix representations;
  Matrix embeddings;
};

MlpOutput mlp_embed(const MlpState& net, const Matrix& x);

/// Parameter gradients of a scalar loss given dLoss/dEmbeddings.
std::vector<DenseLayer> mlp_backprop(const MlpState& net, const Matrix& x,
                                     const Matrix& embedding_gradient);

struct MlpTrainResult {
  MlpState state;
  std::vector<double> loss_history;  // loss before each update, then the final loss
};

/// Full-batch gradient descent of training_loss() over the network outputs.
/// Throws DivergenceError when the loss becomes non-finite.
MlpTrainResult mlp_train(const MlpConfig& cfg, const ViewSet& views, const ObjectiveSpec& objective,
                         const PartialKernel& kernel, const SolverConfig& opt);
MlpTrainResult mlp_train(MlpState initial, const Matrix& inputs, const ObjectiveSpec& objective,
                         const TrainingTargets& targets, const SolverConfig& opt);

struct ProbeOptions {
  int max_iters = 500;
  double step = 0.5;
  double l2 = 1e-4;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct ProbeResult {
  double train_accuracy = 0;
  double validation_accuracy = 0;
  Matrix weights;  // standardized features (+1 bias row) x classes
  Vector feature_mean;
  Vector feature_scale;
};

/// Softmax regression on standardized features, seeded 80/20 split.
ProbeResult linear_probe(const Matrix& features, const std::vector<int>& labels,
                         const ProbeOptions& opt = {});

struct StudySetup {
  ViewSet views;
  PartialKernel kernel;
  ObjectiveSpec objective;
  SolverConfig train;
  ProbeOptions probe;
};

struct StudyRow {
  std::string config;
  Index head_depth = 0;
  Index head_parameters = 0;
  std::uint64_t seed = 0;
  double mu_repr = 0;
  double mu_emb = 0;
  double acc_repr = 0;
  double acc_emb = 0;
};

/// Trains every (config, seed) pair and measures incoherence and probe
/// accuracy of representations and embeddings. Rows come out in
/// config-major, seed-minor order regardless of `threads`.
std::vector<StudyRow> proposition2_study(const std::vector<MlpConfig>& configs,
                                         const StudySetup& setup,
                                         const std::vector<std::uint64_t>& seeds,
                                         unsigned threads = 1);

/// CSV `config,seed,mu_repr,mu_emb,acc_repr,acc_emb`.
void write_csv(std::ostream& out, const std::vector<StudyRow>& rows);

/// Flat CSV of named parameter blocks: a `name,rows,cols` header line per
/// block followed by one line per row of values.
void write_state_csv(std::ostream& out, const MlpState& net);
MlpState read_state_csv(std::istream& in);

}  // namespace heatlab
