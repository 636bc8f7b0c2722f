#pragma once

// Bare system parameters of the membrane-in-the-middle cavity and the scalar
// quantities derived directly from them (drive amplitude, bath occupancy,
// mechanical quality factor).
//
// All frequencies and rates are stored as angular frequencies (rad/s).

#include <cmath>
#include <limits>
#include <string>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

/// Converts an ordinary frequency f (Hz) to ω = 2πf (rad/s).
constexpr double angular_from_hz(double hz) { return constants::two_pi * hz; }
constexpr double hz_from_angular(double omega) { return omega / constants::two_pi; }

struct PhysicalParams {
  double omega_m = 0.0;           ///< mechanical frequency (rad/s)
  double gamma_m = 0.0;           ///< mechanical damping (rad/s)
  double kappa_1 = 0.0;           ///< left-mirror decay, the feedback port (rad/s)
  double kappa_2 = 0.0;           ///< right-mirror decay, the output port (rad/s)
  double g_1 = 0.0;               ///< linear coupling (rad/s)
  double g_2 = 0.0;               ///< quadratic coupling (rad/s, signed)
  double drive_wavelength = 0.0;  ///< λ_d (m)
  double drive_power = 0.0;       ///< P_d (W)
  double temperature = 0.0;       ///< bath temperature (K)
  /// Detuning (rad/s). Read as the bare Δ_c = ω_c − ω_d unless the mean-field
  /// solver is told to treat it as the effective Δ̄ or Δ̃ (see DetuningMode).
  double detuning = 0.0;
  double r_b = 0.0;    ///< feedback beam-splitter reflection coefficient
  double theta = 0.0;  ///< feedback loop phase (rad)

  [[nodiscard]] double kappa_total() const { return kappa_1 + kappa_2; }
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::invalid_parameter, what);
}
}  // namespace detail

/// Throws invalid_parameter naming the first violated invariant.
inline void validate(const PhysicalParams& p) {
  using detail::require;
  auto finite = [](double x) { return std::isfinite(x); };
  require(finite(p.omega_m) && p.omega_m > 0.0, "omega_m must be > 0");
  require(finite(p.gamma_m) && p.gamma_m > 0.0, "gamma_m must be > 0");
  require(finite(p.kappa_1) && p.kappa_1 > 0.0, "kappa_1 must be > 0");
  require(finite(p.kappa_2) && p.kappa_2 > 0.0, "kappa_2 must be > 0");
  require(finite(p.g_1) && finite(p.g_2), "couplings must be finite");
  require(finite(p.drive_wavelength) && p.drive_wavelength > 0.0, "drive_wavelength must be > 0");
  require(finite(p.drive_power) && p.drive_power >= 0.0, "drive_power must be >= 0");
  require(finite(p.temperature) && p.temperature >= 0.0, "temperature must be >= 0");
  require(finite(p.detuning), "detuning must be finite");
  require(finite(p.r_b) && p.r_b >= 0.0 && p.r_b < 1.0, "r_b must lie in [0, 1)");
  require(finite(p.theta), "theta must be finite");
}

/// |ε_d| = sqrt(2 P_d κ₁ / ħω_d) with ω_d = 2πc/λ_d. Units: s⁻¹.
inline double drive_amplitude(double drive_power, double kappa_1, double drive_wavelength) {
  detail::require(drive_power >= 0.0, "drive_power must be >= 0");
  detail::require(kappa_1 > 0.0, "kappa_1 must be > 0");
  detail::require(drive_wavelength > 0.0, "drive_wavelength must be > 0");
  const double omega_d = constants::two_pi * constants::speed_of_light / drive_wavelength;
  return std::sqrt(2.0 * drive_power * kappa_1 / (constants::hbar * omega_d));
}

inline double drive_amplitude(const PhysicalParams& p) {
  return drive_amplitude(p.drive_power, p.kappa_1, p.drive_wavelength);
}

/// Bose occupation of the mechanical bath. T = 0 maps to exactly 0.
inline double thermal_occupancy(double temperature, double omega_m) {
  detail::require(omega_m > 0.0, "omega_m must be > 0");
  detail::require(temperature >= 0.0, "temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = constants::hbar * omega_m / (constants::boltzmann * temperature);
  // expm1 overflows to +inf for large x, which yields 0 as required.
  return 1.0 / std::expm1(x);
}

/// Below this Q the Markovian reduction of the Brownian noise is questionable.
inline constexpr double markovian_q_threshold = 1e3;

struct QualityFactor {
  double value = 0.0;
  bool markovian_valid = false;
};

inline QualityFactor mechanical_quality(double omega_m, double gamma_m) {
  detail::require(omega_m > 0.0, "omega_m must be > 0");
  detail::require(gamma_m > 0.0, "gamma_m must be > 0");
  const double q = omega_m / gamma_m;
  return {q, q >= markovian_q_threshold};
}

struct ThermalEnvironment {
  double n_m = 0.0;
  double q_factor = 0.0;
  bool markovian_valid = false;
};

inline ThermalEnvironment thermal_environment(const PhysicalParams& p) {
  const auto q = mechanical_quality(p.omega_m, p.gamma_m);
  return {thermal_occupancy(p.temperature, p.omega_m), q.value, q.markovian_valid};
}

}  // namespace optomech
