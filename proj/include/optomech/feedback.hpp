#pragma once

// Coherent feedback loop: the cavity output is mixed with vacuum on a lossless
// beam splitter and re-injected through the left mirror. Only the fluctuation
// dynamics see the loop; it appears as a modified decay rate and detuning.

#include <cmath>
#include <complex>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

struct FeedbackLoop {
  double r_b = 0.0;
  double t_b = 1.0;
  double theta = 0.0;
};

/// Builds a loop with t_B = sqrt(1 − r_B²). Loop losses are folded into r_B.
inline FeedbackLoop make_feedback_loop(double r_b, double theta) {
  if (!(r_b >= 0.0 && r_b < 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "r_b must lie in [0, 1)");
  }
  if (!std::isfinite(theta)) throw Error(ErrorKind::invalid_parameter, "theta must be finite");
  return {r_b, std::sqrt((1.0 - r_b) * (1.0 + r_b)), theta};
}

struct EffectiveCavity {
  double kappa_tilde = 0.0;
  double delta_tilde = 0.0;
  double eta = 1.0;  ///< κ̃ / (κ₁ + κ₂)
};

/// Coupling strength of the loop, 2 sqrt(κ₁κ₂).
inline double loop_strength(double kappa_1, double kappa_2) {
  return 2.0 * std::sqrt(kappa_1 * kappa_2);
}

/// Detuning shift imposed by the loop: Δ̃ = Δ̄ − feedback_detuning_shift.
inline double feedback_detuning_shift(double kappa_1, double kappa_2, const FeedbackLoop& loop) {
  return loop_strength(kappa_1, kappa_2) * loop.r_b * std::sin(loop.theta);
}

inline EffectiveCavity effective_cavity(double kappa_1, double kappa_2, const FeedbackLoop& loop,
                                        double delta_bar) {
  if (!(kappa_1 > 0.0 && kappa_2 > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "decay rates must be > 0");
  }
  const double kappa_total = kappa_1 + kappa_2;
  const double s = loop_strength(kappa_1, kappa_2);
  EffectiveCavity c;
  c.kappa_tilde = kappa_total - s * loop.r_b * std::cos(loop.theta);
  c.delta_tilde = delta_bar - s * loop.r_b * std::sin(loop.theta);
  c.eta = c.kappa_tilde / kappa_total;
  return c;
}

/// Decay ratio η(r_B, θ) without the detuning part.
inline double decay_ratio(double kappa_1, double kappa_2, double r_b, double theta) {
  return effective_cavity(kappa_1, kappa_2, make_feedback_loop(r_b, theta), 0.0).eta;
}

/// Relative mismatch between the norm of the feedback-modified input noise
/// and κ̃. Zero (to rounding) means the injected noise is still vacuum.
inline double noise_normalization_residual(double kappa_1, double kappa_2, const FeedbackLoop& loop) {
  const double kappa_tilde = effective_cavity(kappa_1, kappa_2, loop, 0.0).kappa_tilde;
  const std::complex<double> port_2 =
      std::sqrt(kappa_2) - std::sqrt(kappa_1) * loop.r_b * std::polar(1.0, loop.theta);
  const double norm = loop.t_b * loop.t_b * kappa_1 + std::norm(port_2);
  return std::abs(norm - kappa_tilde) / kappa_tilde;
}

struct DelayReport {
  double delay = 0.0;     ///< loop transit time (s)
  double lifetime = 0.0;  ///< 1/κ̃ (s)
  bool valid = true;      ///< advisory: delay ≤ 0.01 lifetime
};

/// Checks whether the loop can be treated as instantaneous. Advisory only.
inline DelayReport delay_validity(double loop_length, double kappa_tilde, double refractive_index = 1.0) {
  if (!(loop_length >= 0.0)) throw Error(ErrorKind::invalid_parameter, "loop_length must be >= 0");
  if (!(kappa_tilde > 0.0)) throw Error(ErrorKind::invalid_parameter, "kappa_tilde must be > 0");
  DelayReport r;
  r.delay = refractive_index * loop_length / constants::speed_of_light;
  r.lifetime = 1.0 / kappa_tilde;
  r.valid = r.delay <= 0.01 * r.lifetime;
  return r;
}

struct EtaSample {
  double r_b;
  double theta;
  double eta;
};

/// Closed-form η surface on a row-major (r_B, θ) grid, both endpoints included.
inline std::vector<EtaSample> eta_surface(double kappa_1, double kappa_2, double r_b_min, double r_b_max,
                                          std::size_t r_b_count, double theta_min, double theta_max,
                                          std::size_t theta_count) {
  if (r_b_count < 2 || theta_count < 2) {
    throw Error(ErrorKind::invalid_parameter, "grid counts must be >= 2");
  }
  std::vector<EtaSample> out;
  out.reserve(r_b_count * theta_count);
  for (std::size_t i = 0; i < r_b_count; ++i) {
    const double r = r_b_min + (r_b_max - r_b_min) * static_cast<double>(i) / static_cast<double>(r_b_count - 1);
    for (std::size_t j = 0; j < theta_count; ++j) {
      const double th =
          theta_min + (theta_max - theta_min) * static_cast<double>(j) / static_cast<double>(theta_count - 1);
      out.push_back({r, th, decay_ratio(kappa_1, kappa_2, r, th)});
    }
  }
  return out;
}

}  // namespace optomech
