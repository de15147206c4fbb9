#pragma once

#include <cstdint>

namespace heatlab {

enum class Retraction { qr, projection };

struct SolverConfig {
  int max_iters = 1000;
  double step = 0.1;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  Retraction retraction = Retraction::qr;
  bool cosine_decay = false;
};

/// Step at iteration `iter`: constant, or cosine-annealed to zero over max_iters.
double scheduled_step(const SolverConfig& cfg, int iter);

}  // namespace heatlab
