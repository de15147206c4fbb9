#pragma once

// Reproducible experiment setups shared by the command-line runner and the
// acceptance suite. Each scenario is a plain parameter struct and a function
// that runs it end to end.

#include <cstdint>
#include <string>
#include <vector>

#include "heatlab/dataset.hpp"
#include "heatlab/embedding.hpp"
#include "heatlab/model.hpp"
#include "heatlab/objectives.hpp"
#include "heatlab/solvers.hpp"

namespace heatlab {

/// Centers every column and rescales all entries to root-mean-square `rms`.
Matrix standardize(const Matrix& x, double rms);

// Trace-objective training of a linear encoder on the partial ideal kernel.
struct RecoveryScenario {
  int classes = 3;
  Index per_class = 20;
  Index ambient_dim = 5;
  double spread = 1.0;
  Index views = 2;
  Index epochs = 3;
  double jitter = 1.0;
  double time = 5.0;
  Index dim = 2;
  int iters = 10000;
  double step = 1e-3;
  double mean_penalty = 1.0;  // rho_2 is mean_penalty / n
  std::uint64_t seed = 1;
};

struct RecoveryReport {
  ViewSet views;
  Embedding embedding;
  std::vector<double> loss_history;
  double trained_purity = 0;
  double untrained_purity = 0;  // same encoder before any update
  double ideal_purity = 0;      // spectral embedding of the full ideal graph
};

RecoveryReport spectral_recovery(const RecoveryScenario& s);

// SVT recovery of a rank-r truncated ideal-cluster heat kernel from
// Bernoulli masks, all nested and run for the same iteration budget.
struct CompletionScenario {
  int classes = 3;
  Index per_class = 20;
  double time = 0.5;
  Index rank = 3;
  std::vector<double> probabilities{0.2, 0.4, 0.6, 0.8};
  int iterations = 1000;
  std::uint64_t seed = 11;
};

struct CompletionPoint {
  double p = 0;
  double observed_fraction = 0;
  double error = 0;  // ||X - M||_F / ||M||_F
  CompletionResult result;
};

std::vector<CompletionPoint> completion_study(const CompletionScenario& s);

// Random weak-duality instances: block masks from a view protocol, a
// symmetric-Laplacian heat kernel of a random weighted graph, the SVT primal
// and the exact Stiefel maximizer as dual point.
struct DualityScenario {
  int instances = 100;
  Index max_n = 30;
  std::uint64_t seed = 7;
  double svt_tolerance = 1e-10;
  int svt_iters = 50000;
};

std::vector<DualityReport> duality_study(const DualityScenario& s);

struct HadamardScenario {
  int trials = 1000;
  Index max_n = 40;
  std::uint64_t seed = 8;
};

std::vector<HadamardBound> hadamard_trials(const HadamardScenario& s);

// Head-depth sweep for the representation-versus-embedding incoherence study.
struct HeadDepthScenario {
  int classes = 3;
  Index per_class = 20;
  Index ambient_dim = 16;
  double spread = 1.0;
  Index views = 2;
  Index epochs = 2;
  double jitter = 1.0;
  double time = 5.0;
  Index width = 8;
  Index encoder_depth = 2;
  Index max_head_depth = 3;
  Activation activation = Activation::tanh;
  ObjectiveKind objective = ObjectiveKind::infonce;
  double kappa = 2.0;
  int iters = 1000;
  double step = 0.01;
  int seeds = 10;
  std::uint64_t first_seed = 100;
  std::uint64_t data_seed = 1;
  unsigned threads = 1;
};

std::vector<StudyRow> head_depth_study(const HeadDepthScenario& s);

struct HeadDepthSummary {
  std::vector<Index> depths;
  std::vector<double> median_mu_repr;
  std::vector<double> median_mu_emb;
  std::vector<double> median_acc_repr;
  std::vector<double> median_acc_emb;
  double spearman_repr = 0;  // head depth vs median representation incoherence
};

HeadDepthSummary summarize(const std::vector<StudyRow>& rows);

// Incoherence estimates against their closed forms and bounds: block-diagonal
// ones matrices (shuffled membership) over every partition of n <= max_partition_n
// and one configuration per (n, r, n_min) up to max_n, the constant rank-1
// matrix, and random low-rank matrices.
struct CoherenceScenario {
  Index max_partition_n = 12;
  Index max_n = 60;
  Index grid_step = 3;  // n values max_partition_n+1, +grid_step, ... up to max_n
  int random_trials = 200;
  std::uint64_t seed = 3;
};

struct CoherenceCase {
  std::string kind;  // "block", "constant" or "random"
  std::string layout;  // block sizes joined by '-', empty otherwise
  Index rows = 0;
  Index cols = 0;
  Index rank = 0;
  double mu = 0;
  double expected = 0;  // closed form; NaN for random cases
  double mu_left = 0;
  double mu_right = 0;
};

std::vector<CoherenceCase> coherence_study(const CoherenceScenario& s);

}  // namespace heatlab
