#pragma once

// Odd half-wavelength mode of a Fabry–Perot cavity with a partially
// reflective membrane near its centre, and its quadratic expansion around the
// membrane equilibrium position.

#include <cmath>
#include <string>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

struct MembraneGeometry {
  double reflectivity = 0.0;          ///< R_m in [0, 1]
  double equilibrium_position = 0.0;  ///< q₀ (m)
  double half_length = 0.0;           ///< L (m); mirrors at ±L
  int mode_number = 1;                ///< n ≥ 1

  [[nodiscard]] double omega_n() const { return mode_number * constants::pi * constants::speed_of_light / half_length; }
  [[nodiscard]] double wavenumber() const { return omega_n() / constants::speed_of_light; }
  [[nodiscard]] double wavelength() const { return 2.0 * half_length / mode_number; }
  /// Subcavity round-trip time τ = 2L/c.
  [[nodiscard]] double round_trip_time() const { return 2.0 * half_length / constants::speed_of_light; }
};

/// Throws invalid_parameter for geometries outside the model; returns soft
/// warnings for geometries where the approximations get shaky.
inline std::vector<std::string> check_geometry(const MembraneGeometry& g, double omega_m = 0.0) {
  if (!(g.reflectivity >= 0.0 && g.reflectivity <= 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "reflectivity must lie in [0, 1]");
  }
  if (!(g.half_length > 0.0)) throw Error(ErrorKind::invalid_parameter, "half_length must be > 0");
  if (g.mode_number < 1) throw Error(ErrorKind::invalid_parameter, "mode_number must be >= 1");
  if (!std::isfinite(g.equilibrium_position)) {
    throw Error(ErrorKind::invalid_parameter, "equilibrium_position must be finite");
  }
  std::vector<std::string> warnings;
  if (std::abs(g.equilibrium_position) >= g.wavelength() / 10.0) {
    warnings.emplace_back("|q0| >= lambda_n/10: second-order expansion may be inaccurate");
  }
  if (omega_m > 0.0 && omega_m * g.round_trip_time() >= 0.01) {
    warnings.emplace_back("omega_m * tau >= 0.01: adiabatic cavity response is questionable");
  }
  return warnings;
}

/// ω_{n,o}(q₁) = ω_n + π/τ − (1/τ)[asin(√R cos 2k_n q₁) + asin(√R)].
inline double cavity_frequency_profile(double q1, const MembraneGeometry& g) {
  const double tau = g.round_trip_time();
  const double root_r = std::sqrt(g.reflectivity);
  return g.omega_n() + constants::pi / tau -
         (std::asin(root_r * std::cos(2.0 * g.wavenumber() * q1)) + std::asin(root_r)) / tau;
}

struct CouplingExpansion {
  double omega_c = 0.0;
  double g_1 = 0.0;  ///< rad/s per metre
  double g_2 = 0.0;  ///< rad/s per metre²
  double sigma = 0.0;
};

/// Second-order expansion ω_{n,o}(q₀ + q) ≈ ω_c + g₁ q + g₂ q².
inline CouplingExpansion expand_couplings(const MembraneGeometry& g) {
  check_geometry(g);
  const double k = g.wavenumber();
  const double tau = g.round_trip_time();
  const double phase = 2.0 * k * g.equilibrium_position;
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  const double sigma = std::sqrt(s * s + (1.0 - g.reflectivity) * c * c);
  if (sigma == 0.0) {
    throw Error(ErrorKind::degenerate_expansion, "sigma = 0 (R_m = 1 at a node or antinode)");
  }
  const double root_r = std::sqrt(g.reflectivity);
  CouplingExpansion e;
  e.sigma = sigma;
  e.omega_c = cavity_frequency_profile(g.equilibrium_position, g);
  e.g_1 = 2.0 * k * root_r * s / (tau * sigma);
  e.g_2 = 2.0 * k * k * root_r * (1.0 - g.reflectivity) * c / (tau * sigma * sigma * sigma);
  return e;
}

}  // namespace optomech
