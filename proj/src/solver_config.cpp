#include "heatlab/solver_config.hpp"

#include <cmath>
#include <numbers>

namespace heatlab {

double scheduled_step(const SolverConfig& cfg, int iter) {
  if (!cfg.cosine_decay || cfg.max_iters <= 0) return cfg.step;
  const double progress = static_cast<double>(iter) / static_cast<double>(cfg.max_iters);
  return cfg.step * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace heatlab
