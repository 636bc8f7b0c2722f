#pragma once

// Entanglement, squeezing and physicality of a two-mode Gaussian covariance
// matrix in the (δq, δp, δX, δY) basis with vacuum variance 1/2.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "optomech/basis.hpp"
#include "optomech/errors.hpp"
#include "optomech/gaussian_dynamics.hpp"

namespace optomech {

/// Zero-point variance of a quadrature.
inline constexpr double vacuum_variance = 0.5;
inline constexpr double physicality_tolerance = 1e-9;

struct BlockDecomposition {
  Matrix2 block_a;  ///< mechanics
  Matrix2 block_b;  ///< optics
  Matrix2 block_c;  ///< mechanics × optics

  [[nodiscard]] Matrix4 reassemble() const {
    Matrix4 v;
    v << block_a, block_c, block_c.transpose(), block_b;
    return v;
  }
};

inline BlockDecomposition decompose(const CovarianceMatrix& cm) {
  return {cm.v.topLeftCorner<2, 2>(), cm.v.bottomRightCorner<2, 2>(), cm.v.topRightCorner<2, 2>()};
}

namespace detail {

/// Smaller symplectic eigenvalue of a two-mode CM from its seralian
/// Σ and det V: ν² = 2 detV / (Σ + √(Σ² − 4 detV)). Slightly negative
/// discriminants (rounding near pure states) are clamped to zero.
inline double smaller_symplectic_eigenvalue(double sigma, double det_v) {
  const double scale = std::max(1.0, sigma * sigma);
  double disc = sigma * sigma - 4.0 * det_v;
  if (disc < 0.0) {
    if (disc < -1e-9 * scale) {
      throw Error(ErrorKind::invalid_covariance, "negative symplectic discriminant");
    }
    disc = 0.0;
  }
  const double denom = sigma + std::sqrt(disc);
  if (!(denom > 0.0)) throw Error(ErrorKind::invalid_covariance, "nonpositive seralian");
  const double nu_sq = 2.0 * det_v / denom;
  if (nu_sq < 0.0) throw Error(ErrorKind::invalid_covariance, "negative determinant");
  return std::sqrt(nu_sq);
}

}  // namespace detail

struct EntanglementResult {
  double nu_minus = 0.0;
  double e_n = 0.0;
  double sigma_v = 0.0;
};

/// E_N = max(0, −ln 2ν⁻) with ν⁻ the smallest symplectic eigenvalue of the
/// partially transposed CM.
inline EntanglementResult log_negativity(const CovarianceMatrix& cm) {
  if (!cm.v.allFinite()) throw Error(ErrorKind::invalid_covariance, "non-finite covariance");
  const auto b = decompose(cm);
  EntanglementResult r;
  r.sigma_v = b.block_a.determinant() + b.block_b.determinant() - 2.0 * b.block_c.determinant();
  r.nu_minus = detail::smaller_symplectic_eigenvalue(r.sigma_v, cm.v.determinant());
  r.e_n = r.nu_minus < vacuum_variance ? -std::log(2.0 * r.nu_minus) : 0.0;
  return r;
}

struct SqueezingResult {
  double s_q = 0.0;  ///< dB
  double s_p = 0.0;  ///< dB
  double sigma_q = 0.0;
  double sigma_p = 0.0;
};

inline double squeezing_db(double variance) {
  if (!(variance > 0.0)) throw Error(ErrorKind::invalid_covariance, "quadrature variance must be > 0");
  return -10.0 * std::log10(variance / vacuum_variance);
}

inline SqueezingResult squeezing_degrees(const CovarianceMatrix& cm) {
  SqueezingResult r;
  r.sigma_q = cm.v(mech_q, mech_q);
  r.sigma_p = cm.v(mech_p, mech_p);
  r.s_q = squeezing_db(r.sigma_q);
  r.s_p = squeezing_db(r.sigma_p);
  return r;
}

struct PhysicalityReport {
  double nu_tilde_min = 0.0;
  double nu_tilde_spectral = 0.0;  ///< same quantity from the spectrum of ΩV
  bool physical = false;
};

/// Two-mode symplectic form for the (q, p, X, Y) ordering.
inline Matrix4 symplectic_form() {
  Matrix4 omega = Matrix4::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

/// Smallest symplectic eigenvalue of V itself, computed from the seralian
/// Σ̃ = detA + detB + 2detC and independently from the eigenvalues ±iν of ΩV.
inline PhysicalityReport physicality(const CovarianceMatrix& cm) {
  PhysicalityReport r;
  if (!cm.v.allFinite()) return r;
  const auto b = decompose(cm);
  const double sigma = b.block_a.determinant() + b.block_b.determinant() + 2.0 * b.block_c.determinant();
  try {
    r.nu_tilde_min = detail::smaller_symplectic_eigenvalue(sigma, cm.v.determinant());
  } catch (const Error&) {
    r.nu_tilde_min = 0.0;
  }
  Eigen::EigenSolver<Matrix4> solver(symplectic_form() * cm.v, false);
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) smallest = std::min(smallest, std::abs(solver.eigenvalues()[i]));
  r.nu_tilde_spectral = smallest;
  r.physical = r.nu_tilde_min >= vacuum_variance - physicality_tolerance;
  return r;
}

}  // namespace optomech
