#pragma once

// Linear Gaussian dynamics of the fluctuations u = (δq, δp, δX, δY):
// u̇ = A u + noise, with steady-state covariance from A V + V Aᵀ = −D.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "optomech/basis.hpp"
#include "optomech/errors.hpp"
#include "optomech/feedback.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

struct DriftMatrix {
  Matrix4 a = Matrix4::Zero();
};

struct DiffusionMatrix {
  Matrix4 d = Matrix4::Zero();
};

struct CovarianceMatrix {
  Matrix4 v = Matrix4::Zero();
};

/// Drift of the linearized, feedback-modified fluctuations:
///
///   [ 0      ω_m   0     0  ]
///   [ −Ω_m  −γ_m   √2λ   0  ]
///   [ 0      0    −κ̃    Δ̃  ]
///   [ √2λ    0    −Δ̃   −κ̃  ]
///
/// The (δY, δX) entry is −Δ̃, as follows from δȧ = −(iΔ̃ + κ̃)δa + iλδq.
inline DriftMatrix build_drift(const EffectiveModel& model, const EffectiveCavity& cavity, double gamma_m,
                               double omega_m) {
  const double coupling = std::sqrt(2.0) * model.lambda_eff;
  DriftMatrix m;
  auto& a = m.a;
  a(mech_q, mech_p) = omega_m;
  a(mech_p, mech_q) = -model.omega_eff;
  a(mech_p, mech_p) = -gamma_m;
  a(mech_p, opt_x) = coupling;
  a(opt_x, opt_x) = -cavity.kappa_tilde;
  a(opt_x, opt_y) = cavity.delta_tilde;
  a(opt_y, mech_q) = coupling;
  a(opt_y, opt_x) = -cavity.delta_tilde;
  a(opt_y, opt_y) = -cavity.kappa_tilde;
  return m;
}

/// D = diag[0, γ_m(2n_m + 1), κ̃, κ̃].
inline DiffusionMatrix build_diffusion(double gamma_m, double n_m, double kappa_tilde) {
  if (!(gamma_m >= 0.0 && n_m >= 0.0 && kappa_tilde >= 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "diffusion inputs must be nonnegative");
  }
  DiffusionMatrix m;
  m.d(mech_p, mech_p) = gamma_m * (2.0 * n_m + 1.0);
  m.d(opt_x, opt_x) = kappa_tilde;
  m.d(opt_y, opt_y) = kappa_tilde;
  return m;
}

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

struct StabilityReport {
  bool stable = false;
  double margin = 0.0;  ///< max Re(eigenvalue) (rad/s)
  bool routh_hurwitz_stable = false;
  bool eigenvalue_stable = false;
  bool method_agreement = true;
};

/// |margin| below this fraction of the frequency scale counts as marginal
/// and is classified unstable.
inline constexpr double marginal_fraction = 1e-9;
/// Verdicts must agree whenever |margin| exceeds this fraction of the scale.
inline constexpr double agreement_fraction = 1e-6;

/// Characteristic polynomial det(sI − M) = s⁴ + c[3]s³ + c[2]s² + c[1]s + c[0]
/// by Faddeev–LeVerrier. Returned ascending, leading 1 omitted.
inline std::array<double, 4> characteristic_polynomial(const Matrix4& m) {
  std::array<double, 4> c{};
  Matrix4 mk = Matrix4::Identity();
  double ck = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const Matrix4 am = m * mk;
    ck = -am.trace() / k;
    c[static_cast<std::size_t>(4 - k)] = ck;
    mk = am + ck * Matrix4::Identity();
  }
  return c;
}

/// Routh–Hurwitz test for s⁴ + a₁s³ + a₂s² + a₃s + a₄.
inline bool routh_hurwitz_stable(const std::array<double, 4>& ascending) {
  const double a1 = ascending[3], a2 = ascending[2], a3 = ascending[1], a4 = ascending[0];
  constexpr double guard = 64.0 * std::numeric_limits<double>::epsilon();
  if (!(a1 > 0.0 && a2 > 0.0 && a3 > 0.0 && a4 > 0.0)) return false;
  const double h2 = a1 * a2 - a3;
  if (!(h2 > guard * (a1 * a2 + a3))) return false;
  const double h3 = a3 * h2 - a1 * a1 * a4;
  return h3 > guard * (a3 * (a1 * a2 + a3) + a1 * a1 * a4);
}

/// `scale` sets the marginal tolerance and the polynomial scaling; by default
/// it is the mechanical frequency sitting in A(δq, δp).
inline StabilityReport assess_stability(const DriftMatrix& drift, double scale = 0.0) {
  if (scale <= 0.0) scale = std::abs(drift.a(mech_q, mech_p));
  if (scale <= 0.0) scale = std::max(drift.a.cwiseAbs().maxCoeff(), 1e-300);
  StabilityReport r;
  if (!drift.a.allFinite()) {
    r.margin = std::numeric_limits<double>::infinity();
    return r;
  }
  const Matrix4 scaled = drift.a / scale;
  Eigen::EigenSolver<Matrix4> solver(scaled, false);
  double margin = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) margin = std::max(margin, solver.eigenvalues()[i].real());
  r.margin = margin * scale;
  r.eigenvalue_stable = margin < -marginal_fraction;
  r.routh_hurwitz_stable = routh_hurwitz_stable(characteristic_polynomial(scaled));
  r.method_agreement = r.eigenvalue_stable == r.routh_hurwitz_stable || std::abs(margin) <= agreement_fraction;
  r.stable = r.eigenvalue_stable && r.routh_hurwitz_stable;
  return r;
}

// ---------------------------------------------------------------------------
// Lyapunov equation
// ---------------------------------------------------------------------------

/// Above this 1-norm condition estimate a warning is attached to the solution.
inline constexpr double lyapunov_condition_warning = 1e12;

struct LyapunovSolution {
  CovarianceMatrix covariance;
  double residual = 0.0;   ///< ‖AV + VAᵀ + D‖_F / ‖D‖_F
  double condition = 0.0;  ///< estimate for the vectorized system
  std::vector<std::string> warnings;
};

inline double lyapunov_residual(const Matrix4& a, const Matrix4& d, const Matrix4& v) {
  const double dn = d.norm();
  const Matrix4 r = a * v + v * a.transpose() + d;
  return dn > 0.0 ? r.norm() / dn : r.norm();
}

/// Solves A V + V Aᵀ = −D by vectorizing to (I⊗A + A⊗I) vec V = −vec D and
/// dense LU with one refinement step. Refuses unstable drifts.
inline LyapunovSolution solve_lyapunov(const DriftMatrix& drift, const DiffusionMatrix& diffusion) {
  const StabilityReport st = assess_stability(drift);
  if (!st.method_agreement) {
    throw Error(ErrorKind::internal_consistency, "Routh-Hurwitz and eigenvalue stability verdicts disagree");
  }
  if (!st.stable) throw Error(ErrorKind::no_steady_state, "drift matrix is not Hurwitz");

  using Matrix16 = Eigen::Matrix<double, 16, 16>;
  using Vector16 = Eigen::Matrix<double, 16, 1>;
  const double scale = std::max(std::abs(drift.a(mech_q, mech_p)), 1e-300);
  const Matrix4 a = drift.a / scale;
  const Matrix4 d = diffusion.d / scale;
  const Matrix4 id = Matrix4::Identity();
  const Matrix16 k = Eigen::kroneckerProduct(id, a) + Eigen::kroneckerProduct(a, id);
  const Vector16 rhs = -Eigen::Map<const Vector16>(d.data());
  Eigen::PartialPivLU<Matrix16> lu(k);
  Vector16 x = lu.solve(rhs);
  x += lu.solve(rhs - k * x);

  LyapunovSolution out;
  Matrix4 v = Eigen::Map<const Matrix4>(x.data());
  out.covariance.v = 0.5 * (v + v.transpose());
  out.condition = 1.0 / lu.rcond();
  if (out.condition > lyapunov_condition_warning) {
    out.warnings.emplace_back("ill-conditioned Lyapunov solve (condition estimate " + std::to_string(out.condition) +
                              ")");
  }
  out.residual = lyapunov_residual(drift.a, diffusion.d, out.covariance.v);
  return out;
}

struct CovarianceFlow {
  CovarianceMatrix covariance;
  bool diverged = false;
};

/// Propagates V̇ = AV + VAᵀ + D from v0 over t_end. Each sub-interval h is
/// solved exactly (Van Loan block exponential), then h is doubled until it
/// covers t_end, so arbitrarily stiff spans cost only O(log) work.
inline CovarianceFlow integrate_cm(const DriftMatrix& drift, const DiffusionMatrix& diffusion,
                                   const CovarianceMatrix& v0, double t_end) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::invalid_parameter, "t_end must be > 0");
  const double scale = std::max(std::abs(drift.a(mech_q, mech_p)), 1e-300);
  const Matrix4 a = drift.a / scale;
  const Matrix4 d = diffusion.d / scale;
  const double horizon = t_end * scale;

  int doublings = 0;
  double h = horizon;
  const double norm = std::max(a.lpNorm<1>(), 1e-300);
  while (h * norm > 0.5 && doublings < 1000) {
    h *= 0.5;
    ++doublings;
  }

  using Matrix8 = Eigen::Matrix<double, 8, 8>;
  Matrix8 block = Matrix8::Zero();
  block.topLeftCorner<4, 4>() = -a * h;
  block.topRightCorner<4, 4>() = d * h;
  block.bottomRightCorner<4, 4>() = a.transpose() * h;
  const Matrix8 e = block.exp();
  Matrix4 phi = e.bottomRightCorner<4, 4>().transpose();
  Matrix4 q = phi * e.topRightCorner<4, 4>();

  for (int i = 0; i < doublings; ++i) {
    q = phi * q * phi.transpose() + q;
    phi = phi * phi;
  }
  CovarianceFlow out;
  const Matrix4 v = phi * v0.v * phi.transpose() + q;
  out.covariance.v = 0.5 * (v + v.transpose());
  out.diverged = !out.covariance.v.allFinite();
  return out;
}

}  // namespace optomech
