#include "heatlab/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "heatlab/model.hpp"
#include "heatlab/objectives.hpp"

namespace heatlab {

namespace {

constexpr double kLossTolerance = 1e-5;
constexpr double kMlpTolerance = 1e-4;

Matrix gaussian(Index rows, Index cols, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

Matrix symmetric(Index n, std::mt19937_64& rng) {
  const Matrix a = gaussian(n, n, 1.0, rng);
  return (a + a.transpose()) / 2.0;
}

}  // namespace

Matrix numerical_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) {
      const double keep = probe(i, j);
      probe(i, j) = keep + h;
      const double up = f(probe);
      probe(i, j) = keep - h;
      const double down = f(probe);
      probe(i, j) = keep;
      g(i, j) = (up - down) / (2.0 * h);
    }
  return g;
}

double relative_error(const Matrix& analytic, const Matrix& numeric, double floor) {
  const double scale = std::max({analytic.norm(), numeric.norm(), floor});
  return (analytic - numeric).norm() / scale;
}

std::vector<GradientCheck> gradient_suite(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GradientCheck> out;
  auto record = [&](const std::string& name, double tol, auto&& one_point) {
    GradientCheck c{name, points, 0.0, tol};
    for (int p = 0; p < points; ++p) c.max_relative_error = std::max(c.max_relative_error, one_point());
    out.push_back(c);
  };

  record("trace", kLossTolerance, [&] {
    const Matrix k = symmetric(8, rng);
    const Matrix z = gaussian(8, 2, 0.5, rng);
    const TracePenalties rho{0.7, 1.3, 0.9};
    const auto f = [&](const Matrix& x) { return trace_objective(x, k, rho).value; };
    return relative_error(trace_objective(z, k, rho).gradient, numerical_gradient(f, z));
  });

  record("infonce", kLossTolerance, [&] {
    const Matrix z = normalize_rows(gaussian(6, 2, 1.0, rng));
    const PositivePairs pairs{{0, 1}, {2, 3}, {4, 5}, {1, 4}};
    const bool self = std::bernoulli_distribution(0.5)(rng);
    const InfoNceOptions opt{.kappa = 2.0, .include_self = self, .require_unit_rows = false};
    const auto f = [&](const Matrix& x) { return infonce(x, pairs, opt).value; };
    return relative_error(infonce(z, pairs, opt).gradient, numerical_gradient(f, z));
  });

  record("barlow_twins", kLossTolerance, [&] {
    const Matrix a = gaussian(6, 3, 1.0, rng);
    const Matrix b = a + gaussian(6, 3, 0.5, rng);
    const PairLossValue v = barlow_twins(a, b, 0.005);
    const auto fa = [&](const Matrix& x) { return barlow_twins(x, b, 0.005).value; };
    const auto fb = [&](const Matrix& x) { return barlow_twins(a, x, 0.005).value; };
    return std::max(relative_error(v.gradient_a, numerical_gradient(fa, a)),
                    relative_error(v.gradient_b, numerical_gradient(fb, b)));
  });

  record("vicreg", kLossTolerance, [&] {
    Matrix adjacency = Matrix::Zero(8, 8);
    for (Index o = 0; o < 4; ++o) adjacency(2 * o, 2 * o + 1) = adjacency(2 * o + 1, 2 * o) = 1.0;
    Matrix z;
    do {  // stay clear of the hinge kink at unit column norm
      z = gaussian(8, 3, 0.36, rng);
    } while (((z.colwise().norm().array() - 1.0).abs() < 1e-3).any());
    const VicregWeights w{1.0, 0.5, 0.25};
    const auto f = [&](const Matrix& x) { return vicreg(x, adjacency, w).value; };
    return relative_error(vicreg(z, adjacency, w).gradient, numerical_gradient(f, z));
  });

  record("mlp", kMlpTolerance, [&] {
    MlpConfig cfg;
    cfg.encoder_widths = {5, 4};
    cfg.head_widths = {3};
    cfg.activation = Activation::tanh;
    cfg.seed = rng();
    const MlpState net = mlp_init(cfg, 4);
    const Matrix x = gaussian(12, 4, 1.0, rng);
    TrainingTargets targets;
    targets.kernel = symmetric(12, rng);
    const ObjectiveSpec spec;

    const Matrix y = mlp_embed(net, x).embeddings;
    const auto grads = mlp_backprop(net, x, training_loss(spec, y, targets).gradient);
    double worst = 0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      auto loss_with = [&](auto&& edit) {
        MlpState probe = net;
        edit(probe.layers[l]);
        return training_loss(spec, mlp_embed(probe, x).embeddings, targets).value;
      };
      const auto fw = [&](const Matrix& w) { return loss_with([&](DenseLayer& d) { d.weight = w; }); };
      const auto fb = [&](const Matrix& b) { return loss_with([&](DenseLayer& d) { d.bias = b.col(0); }); };
      worst = std::max(worst, relative_error(grads[l].weight, numerical_gradient(fw, net.layers[l].weight)));
      const Matrix bias = net.layers[l].bias;
      worst = std::max(worst, relative_error(Matrix(grads[l].bias), numerical_gradient(fb, bias)));
    }
    return worst;
  });
  return out;
}

}  // namespace heatlab
