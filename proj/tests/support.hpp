#pragma once

#include <cmath>
#include <random>

#include "optomech/optomech.hpp"

namespace optomech::support {

/// Membrane-entanglement parameter set in internal units.
inline PhysicalParams entanglement_params(double delta_over_omega_m = 0.6, double g2_over_g1 = 0.0) {
  SystemConfig c = entanglement_base();
  c.delta_over_omega_m = delta_over_omega_m;
  c.g2_over_g1 = g2_over_g1;
  return to_physical_params(c);
}

inline PhysicalParams squeezing_params(double delta_over_omega_m = 0.1, double g2_over_g1 = -1e-3) {
  SystemConfig c = squeezing_base();
  c.delta_over_omega_m = delta_over_omega_m;
  c.g2_over_g1 = g2_over_g1;
  return to_physical_params(c);
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace optomech::support
