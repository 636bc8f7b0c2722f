#pragma once

// Mean-field fixed point of the driven membrane-cavity system and the
// effective parameters of the linearized fluctuation dynamics.
//
// The self-consistency n (Δ̄(n)² + κ²) = ε² with q_s(n) = g₁n / (ω_m − 2g₂n)
// is cleared of its (ω_m − 2g₂n) denominators and solved as a polynomial of
// degree ≤ 5 in the scaled photon number u = n / n_s, n_s = ε²/κ². Every
// admissible root satisfies 0 < u ≤ 1, and frequencies are measured in units
// of ω_m, so the coefficients stay O(1)-ish even when n ~ 10⁹.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/feedback.hpp"
#include "optomech/physical_model.hpp"
#include "optomech/polynomial.hpp"

namespace optomech {

/// How PhysicalParams::detuning is interpreted by the mean-field solver.
enum class DetuningMode {
  delta_c,      ///< bare Δ_c; Δ̄ follows self-consistently
  delta_bar,    ///< effective Δ̄ fixed; Δ_c is back-computed
  delta_tilde,  ///< feedback-modified Δ̃ fixed; Δ̄ and Δ_c back-computed
};

enum class BranchRule { lowest, highest, index };

struct BranchSelection {
  BranchRule rule = BranchRule::lowest;
  std::size_t index = 0;
};

struct MeanFieldOptions {
  DetuningMode detuning_mode = DetuningMode::delta_c;
  BranchSelection branch{};
  /// Let the loop also modify the mean field (κ̃ and the loop detuning shift
  /// enter the self-consistency). Off by default.
  bool feedback_in_mean_field = false;
};

struct MeanFieldBranch {
  double photon_number = 0.0;
  double q_s = 0.0;
  double delta_bar = 0.0;
  double omega_eff = 0.0;
};

struct EffectiveModel {
  double alpha_s = 0.0;  ///< real, nonnegative after re-phasing
  double photon_number = 0.0;
  double q_s = 0.0;
  double p_s = 0.0;
  double delta_c = 0.0;    ///< bare detuning (given or back-computed)
  double delta_bar = 0.0;  ///< Δ_c − g₁q_s − g₂q_s²
  double omega_eff = 0.0;  ///< Ω_m = ω_m − 2g₂|α_s|²
  double lambda_eff = 0.0; ///< λ = (g₁ + 2g₂q_s) α_s
  std::size_t branch_count = 0;
  std::size_t selected_branch = 0;
  std::vector<MeanFieldBranch> branches;  ///< ascending photon number
};

/// Ω_m = ω_m − 2g₂n. Negative values are allowed; stability flags them later.
constexpr double effective_frequency(double omega_m, double g_2, double photon_number) {
  return omega_m - 2.0 * g_2 * photon_number;
}

/// Relative distance from the softening pole at which a root is rejected.
inline constexpr double softening_pole_tolerance = 1e-6;

namespace detail {

/// The mean-field self-consistency in physical units, as seen by the solver.
struct MeanFieldProblem {
  double omega_m = 0.0;
  double g_1 = 0.0;
  double g_2 = 0.0;
  double kappa = 0.0;     ///< decay entering the mean field
  double detuning = 0.0;  ///< Δ_c minus any loop shift entering the mean field
  double epsilon = 0.0;

  [[nodiscard]] double q_of(double n) const { return g_1 * n / (omega_m - 2.0 * g_2 * n); }
  [[nodiscard]] double delta_of(double n) const {
    const double q = q_of(n);
    return detuning - g_1 * q - g_2 * q * q;
  }
  /// (n(Δ² + κ²) − ε²) / ε².
  [[nodiscard]] double relative_residual(double n) const {
    const double d = delta_of(n);
    return (n * (d * d + kappa * kappa) - epsilon * epsilon) / (epsilon * epsilon);
  }
  [[nodiscard]] bool has_pole() const { return g_2 > 0.0; }
  [[nodiscard]] double pole() const { return omega_m / (2.0 * g_2); }
};

/// Scaled form: G(u) = u(Δ̂(u)² + k²) − k², d(u) = 1 − b u.
struct ScaledProblem {
  double b, c1, c2, delta, k;

  explicit ScaledProblem(const MeanFieldProblem& p) {
    const double n_s = p.epsilon * p.epsilon / (p.kappa * p.kappa);
    b = 2.0 * p.g_2 * n_s / p.omega_m;
    c1 = p.g_1 * p.g_1 * n_s / (p.omega_m * p.omega_m);
    c2 = p.g_2 * p.g_1 * p.g_1 * n_s * n_s / (p.omega_m * p.omega_m * p.omega_m);
    delta = p.detuning / p.omega_m;
    k = p.kappa / p.omega_m;
  }

  [[nodiscard]] double d(double u) const { return 1.0 - b * u; }
  [[nodiscard]] double delta_hat(double u) const {
    const double dd = d(u);
    return delta - c1 * u / dd - c2 * u * u / (dd * dd);
  }
  [[nodiscard]] double g(double u) const {
    const double dh = delta_hat(u);
    return u * (dh * dh + k * k) - k * k;
  }
  [[nodiscard]] double g_prime(double u) const {
    const double dd = d(u);
    const double dh = delta_hat(u);
    const double dh_prime = -c1 / (dd * dd) - 2.0 * c2 * u / (dd * dd * dd);
    return dh * dh + k * k + 2.0 * u * dh * dh_prime;
  }
  /// d(u)⁴ G(u) as an explicit polynomial.
  [[nodiscard]] Polynomial<double> cleared() const {
    using P = Polynomial<double>;
    const P dp{1.0, -b};
    const P u = P::monomial(1);
    const P d2 = dp * dp;
    const P d4 = d2 * d2;
    const P numerator = delta * d2 - c1 * (u * dp) - c2 * (u * u);
    return u * (numerator * numerator + (k * k) * d4) - (k * k) * d4;
  }
};

inline double polish_scaled_root(const ScaledProblem& s, double u, double lo, double hi) {
  for (int i = 0; i < 60; ++i) {
    const double gp = s.g_prime(u);
    if (gp == 0.0 || !std::isfinite(gp)) break;
    const double step = s.g(u) / gp;
    const double next = u - step;
    if (!(next > lo && next < hi)) break;
    u = next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(u)) break;
  }
  return u;
}

inline double bisect_scaled_root(const ScaledProblem& s, double lo, double hi) {
  double g_lo = s.g(lo);
  for (int i = 0; i < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = s.g(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All admissible photon numbers, ascending. Combines companion-matrix roots of
/// the cleared polynomial with a bracketed sign-change scan of G on (0, 1].
inline std::vector<double> enumerate_photon_numbers(const MeanFieldProblem& p) {
  if (p.epsilon == 0.0) return {0.0};
  const ScaledProblem s(p);
  const double n_s = p.epsilon * p.epsilon / (p.kappa * p.kappa);
  const double u_pole = s.b > 0.0 ? 1.0 / s.b : std::numeric_limits<double>::infinity();
  const double upper = 1.0 + 1e-9;

  std::vector<double> candidates;
  for (const auto& z : polynomial_roots(s.cleared())) {
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    const double u = z.real();
    if (u > 0.0 && u <= upper) candidates.push_back(polish_scaled_root(s, u, 0.0, upper));
  }

  // Sign-change scan, split at the pole so no bracket straddles it.
  std::vector<double> grid;
  constexpr int geometric = 200;
  constexpr int linear = 400;
  for (int i = 0; i <= geometric; ++i) grid.push_back(std::pow(10.0, -14.0 + 14.0 * i / geometric));
  for (int i = 1; i < linear; ++i) grid.push_back(static_cast<double>(i) / linear);
  if (u_pole < 1.0) {
    for (double f : {1.0 - 1e-9, 1.0 + 1e-9}) grid.push_back(u_pole * f);
  }
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double c = grid[i + 1];
    if (a < u_pole && c > u_pole) continue;
    const double ga = s.g(a);
    const double gc = s.g(c);
    if (!std::isfinite(ga) || !std::isfinite(gc)) continue;
    if ((ga < 0.0) != (gc < 0.0)) {
      const double r = bisect_scaled_root(s, a, c);
      candidates.push_back(polish_scaled_root(s, r, a, c));
    }
  }

  std::vector<double> roots;
  for (double u : candidates) {
    if (!(u > 0.0 && u <= upper)) continue;
    if (std::abs(s.d(u)) <= 1e-14) continue;
    const double n = u * n_s;
    if (std::abs(p.relative_residual(n)) > 1e-10) continue;
    roots.push_back(n);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double n : roots) {
    if (unique.empty() || std::abs(n - unique.back()) > 1e-8 * std::max(n, unique.back())) {
      unique.push_back(n);
    }
  }
  return unique;
}

}  // namespace detail

/// Solves the mean-field fixed point and returns the selected branch together
/// with every admissible branch.
inline EffectiveModel solve_mean_field(const PhysicalParams& params, const MeanFieldOptions& options = {}) {
  validate(params);
  const FeedbackLoop loop = make_feedback_loop(params.r_b, params.theta);
  const double loop_shift = feedback_detuning_shift(params.kappa_1, params.kappa_2, loop);
  const double mf_shift = options.feedback_in_mean_field ? loop_shift : 0.0;

  detail::MeanFieldProblem problem;
  problem.omega_m = params.omega_m;
  problem.g_1 = params.g_1;
  problem.g_2 = params.g_2;
  problem.kappa = options.feedback_in_mean_field
                      ? effective_cavity(params.kappa_1, params.kappa_2, loop, 0.0).kappa_tilde
                      : params.kappa_total();
  problem.epsilon = drive_amplitude(params);

  std::vector<double> photon_numbers;
  double fixed_delta_bar = 0.0;
  if (options.detuning_mode == DetuningMode::delta_c) {
    problem.detuning = params.detuning - mf_shift;
    photon_numbers = detail::enumerate_photon_numbers(problem);
  } else {
    fixed_delta_bar = options.detuning_mode == DetuningMode::delta_bar ? params.detuning
                                                                        : params.detuning + loop_shift;
    const double d = fixed_delta_bar - mf_shift;
    const double n = problem.epsilon * problem.epsilon / (d * d + problem.kappa * problem.kappa);
    if (!(problem.has_pole() && n == problem.pole())) photon_numbers.push_back(n);
  }
  if (photon_numbers.empty()) {
    throw Error(ErrorKind::no_physical_root, "mean-field equation has no admissible root");
  }

  EffectiveModel m;
  for (double n : photon_numbers) {
    MeanFieldBranch b;
    b.photon_number = n;
    b.q_s = problem.q_of(n);
    b.omega_eff = effective_frequency(params.omega_m, params.g_2, n);
    if (options.detuning_mode == DetuningMode::delta_c) {
      b.delta_bar = params.detuning - params.g_1 * b.q_s - params.g_2 * b.q_s * b.q_s;
    } else {
      b.delta_bar = fixed_delta_bar;
    }
    m.branches.push_back(b);
  }
  m.branch_count = m.branches.size();

  switch (options.branch.rule) {
    case BranchRule::lowest: m.selected_branch = 0; break;
    case BranchRule::highest: m.selected_branch = m.branch_count - 1; break;
    case BranchRule::index:
      if (options.branch.index >= m.branch_count) {
        throw Error(ErrorKind::invalid_parameter, "branch index " + std::to_string(options.branch.index) +
                                                      " out of range (" + std::to_string(m.branch_count) +
                                                      " branches)");
      }
      m.selected_branch = options.branch.index;
      break;
  }

  const MeanFieldBranch& sel = m.branches[m.selected_branch];
  if (problem.has_pole() &&
      std::abs(sel.photon_number - problem.pole()) <= softening_pole_tolerance * problem.pole()) {
    throw Error(ErrorKind::near_singular_softening, "selected root sits on the softening pole omega_m/(2 g_2)");
  }
  m.photon_number = sel.photon_number;
  m.alpha_s = std::sqrt(sel.photon_number);
  m.q_s = sel.q_s;
  m.p_s = 0.0;
  m.delta_bar = sel.delta_bar;
  m.delta_c = options.detuning_mode == DetuningMode::delta_c
                  ? params.detuning
                  : sel.delta_bar + params.g_1 * sel.q_s + params.g_2 * sel.q_s * sel.q_s;
  m.omega_eff = sel.omega_eff;
  m.lambda_eff = (params.g_1 + 2.0 * params.g_2 * sel.q_s) * m.alpha_s;
  return m;
}

// ---------------------------------------------------------------------------
// Noise-free nonlinear mean-field dynamics (validation oracle)
// ---------------------------------------------------------------------------

struct MeanFieldState {
  double q = 0.0;
  double p = 0.0;
  double alpha_re = 0.0;
  double alpha_im = 0.0;

  [[nodiscard]] double photon_number() const { return alpha_re * alpha_re + alpha_im * alpha_im; }
};

struct TrajectorySample {
  double t = 0.0;
  MeanFieldState state;
};

struct TrajectoryResult {
  std::vector<TrajectorySample> samples;  ///< one per mechanical period
  MeanFieldState final_state;
  double t_final = 0.0;
  bool converged = false;  ///< false means diverged or still moving (limit cycle)
};

/// Integrates the deterministic nonlinear equations of motion with adaptive
/// Dormand–Prince steps. params.detuning is the bare Δ_c here. Stops early
/// once the state changes by < 1e−10 (relative) over one mechanical period.
inline TrajectoryResult mean_field_trajectory(const PhysicalParams& params, double t_end,
                                              const MeanFieldState& initial,
                                              bool feedback_in_mean_field = false) {
  validate(params);
  if (!(t_end > 0.0)) throw Error(ErrorKind::invalid_parameter, "t_end must be > 0");
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 4>;

  const FeedbackLoop loop = make_feedback_loop(params.r_b, params.theta);
  const double kappa = feedback_in_mean_field
                           ? effective_cavity(params.kappa_1, params.kappa_2, loop, 0.0).kappa_tilde
                           : params.kappa_total();
  const double delta_c =
      params.detuning - (feedback_in_mean_field ? feedback_detuning_shift(params.kappa_1, params.kappa_2, loop) : 0.0);
  const double eps = drive_amplitude(params);
  const double w = params.omega_m;

  // Dimensionless state: τ = ω_m t, α = a_scale A, q = q_scale Q.
  const double a_scale = eps > 0.0 ? eps / kappa : 1.0;
  const double q_scale = params.g_1 != 0.0 ? std::max(1e-300, std::abs(params.g_1) * a_scale * a_scale / w) : 1.0;
  const double gamma_hat = params.gamma_m / w;
  const double force_lin = params.g_1 * a_scale * a_scale / (w * q_scale);
  const double force_quad = 2.0 * params.g_2 * a_scale * a_scale / w;
  const double shift_lin = params.g_1 * q_scale / w;
  const double shift_quad = params.g_2 * q_scale * q_scale / w;
  const double delta_hat = delta_c / w;
  const double kappa_hat = kappa / w;
  const double drive_hat = eps / (w * a_scale);

  auto rhs = [&](const State& x, State& dx, double /*tau*/) {
    const double n = x[2] * x[2] + x[3] * x[3];
    dx[0] = x[1];
    dx[1] = -x[0] - gamma_hat * x[1] + force_lin * n + force_quad * n * x[0];
    const double det = delta_hat - shift_lin * x[0] - shift_quad * x[0] * x[0];
    // dA/dτ = −(i det + k) A + drive
    dx[2] = det * x[3] - kappa_hat * x[2] + drive_hat;
    dx[3] = -det * x[2] - kappa_hat * x[3];
  };

  State x{initial.q / q_scale, initial.p / q_scale, initial.alpha_re / a_scale, initial.alpha_im / a_scale};
  auto unscale = [&](const State& s) {
    return MeanFieldState{s[0] * q_scale, s[1] * q_scale, s[2] * a_scale, s[3] * a_scale};
  };

  TrajectoryResult result;
  result.samples.push_back({0.0, initial});
  const double tau_end = t_end * w;
  const double period = constants::two_pi;
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-14, 1e-12);
  double tau = 0.0;
  double dt = 1e-3;
  State previous = x;
  while (tau < tau_end) {
    const double next = std::min(tau + period, tau_end);
    ode::integrate_adaptive(stepper, rhs, x, tau, next, dt);
    const double reached = next;
    tau = reached;
    bool finite = true;
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      finite = finite && std::isfinite(x[i]);
      diff += (x[i] - previous[i]) * (x[i] - previous[i]);
      norm += x[i] * x[i];
    }
    result.samples.push_back({tau / w, unscale(x)});
    if (!finite) break;
    if (std::sqrt(diff) <= 1e-10 * std::max(std::sqrt(norm), 1e-6)) {
      result.converged = true;
      break;
    }
    previous = x;
  }
  result.final_state = unscale(x);
  result.t_final = tau / w;
  return result;
}

}  // namespace optomech
