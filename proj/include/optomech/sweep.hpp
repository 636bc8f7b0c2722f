#pragma once

// One-point pipeline (steady state → feedback → drift/diffusion → stability →
// Lyapunov → measures), 1D/2D grid sweeps over it, figure presets, and
// deterministic CSV/JSON emission.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/feedback.hpp"
#include "optomech/gaussian_dynamics.hpp"
#include "optomech/measures.hpp"
#include "optomech/physical_model.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

enum class SweepParameter { delta, g2_over_g1, r_b, theta, power_mw, temperature_mk };

inline std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::delta: return "delta";
    case SweepParameter::g2_over_g1: return "g2_over_g1";
    case SweepParameter::r_b: return "r_b";
    case SweepParameter::theta: return "theta";
    case SweepParameter::power_mw: return "power_mw";
    case SweepParameter::temperature_mk: return "temperature_mk";
  }
  return "delta";
}

inline SweepParameter parse_sweep_parameter(std::string_view s) {
  for (auto p : {SweepParameter::delta, SweepParameter::g2_over_g1, SweepParameter::r_b, SweepParameter::theta,
                 SweepParameter::power_mw, SweepParameter::temperature_mk}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorKind::configuration, "unknown sweep parameter '" + std::string(s) + "'");
}

/// Writes a swept value into the configuration, in config units.
inline void apply(SystemConfig& c, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::delta: c.delta_over_omega_m = value; break;
    case SweepParameter::g2_over_g1: c.g2_over_g1 = value; break;
    case SweepParameter::r_b: c.r_b = value; break;
    case SweepParameter::theta: c.theta_rad = value; break;
    case SweepParameter::power_mw: c.power_mw = value; break;
    case SweepParameter::temperature_mk: c.temperature_mk = value; break;
  }
}

/// Evenly spaced values, both endpoints included. A single-point axis holds
/// just `start`.
struct Axis {
  SweepParameter parameter = SweepParameter::delta;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 2;

  [[nodiscard]] double value(std::size_t i) const {
    if (count == 1) return start;
    if (i + 1 == count) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = value(i);
    return v;
  }
};

/// Parses "name:start:stop:count".
inline Axis parse_axis(std::string_view text) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  if (parts.size() != 4) throw Error(ErrorKind::configuration, "axis must be name:start:stop:count");
  Axis a;
  a.parameter = parse_sweep_parameter(parts[0]);
  try {
    std::size_t used = 0;
    a.start = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("start");
    a.stop = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("stop");
    const long long n = std::stoll(parts[3], &used);
    if (used != parts[3].size() || n < 1) throw std::invalid_argument("count");
    a.count = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw Error(ErrorKind::configuration, "malformed axis '" + std::string(text) + "'");
  }
  return a;
}

/// How far down the pipeline each point is evaluated.
enum class OutputLevel {
  full,         ///< through Lyapunov and the measures
  steady_only,  ///< mean field and effective parameters
  eta_only,     ///< closed-form decay ratio only
};

struct PointOptions {
  BranchSelection branch{};
  bool feedback_in_mean_field = false;
  OutputLevel outputs = OutputLevel::full;
};

struct SweepSpec {
  SystemConfig base;
  Axis axis1;
  std::optional<Axis> axis2;
  PointOptions options;

  [[nodiscard]] std::size_t size() const { return axis1.count * (axis2 ? axis2->count : 1); }
};

inline void validate(const SweepSpec& spec) {
  auto check = [](const Axis& a) {
    if (a.count < 1) throw Error(ErrorKind::configuration, "axis count must be >= 1");
    if (!std::isfinite(a.start) || !std::isfinite(a.stop)) {
      throw Error(ErrorKind::configuration, "axis bounds must be finite");
    }
  };
  check(spec.axis1);
  if (spec.axis2) {
    check(*spec.axis2);
    if (spec.axis2->parameter == spec.axis1.parameter) {
      throw Error(ErrorKind::configuration, "the two axes must sweep different parameters");
    }
  }
}

struct ResultRecord {
  std::vector<double> axis_values;
  std::optional<double> eta;
  std::optional<bool> stable;
  std::optional<double> e_n;
  std::optional<double> s_q;
  std::optional<double> s_p;
  std::optional<double> nu_minus;
  std::optional<double> nu_tilde_min;
  std::optional<double> sigma_q;
  std::optional<double> sigma_p;
  std::optional<double> omega_eff_over_omega_m;
  std::optional<double> photon_number;
  std::optional<double> delta_bar_over_omega_m;
  std::optional<double> margin_over_omega_m;
  std::optional<double> lyapunov_residual;
  std::optional<std::size_t> branch_count;
  std::optional<ErrorKind> error_kind;
  std::string error;
};

/// Largest accepted relative Lyapunov residual.
inline constexpr double lyapunov_residual_limit = 1e-10;

/// Full pipeline for one parameter set. Library errors are captured in the
/// record; nothing is thrown.
inline ResultRecord run_point(const SystemConfig& config, const PointOptions& options = {}) {
  ResultRecord r;
  auto fail = [&r](const Error& e) {
    r.error_kind = e.kind();
    r.error = e.what();
  };
  try {
    const PhysicalParams params = to_physical_params(config);
    const FeedbackLoop loop = make_feedback_loop(params.r_b, params.theta);
    r.eta = effective_cavity(params.kappa_1, params.kappa_2, loop, 0.0).eta;
    if (options.outputs == OutputLevel::eta_only) return r;

    MeanFieldOptions mf;
    mf.detuning_mode = config.detuning_mode;
    mf.branch = options.branch;
    mf.feedback_in_mean_field = options.feedback_in_mean_field;
    const EffectiveModel model = solve_mean_field(params, mf);
    r.photon_number = model.photon_number;
    r.omega_eff_over_omega_m = model.omega_eff / params.omega_m;
    r.delta_bar_over_omega_m = model.delta_bar / params.omega_m;
    r.branch_count = model.branch_count;
    if (options.outputs == OutputLevel::steady_only) return r;

    const EffectiveCavity cavity = effective_cavity(params.kappa_1, params.kappa_2, loop, model.delta_bar);
    const DriftMatrix drift = build_drift(model, cavity, params.gamma_m, params.omega_m);
    const StabilityReport st = assess_stability(drift);
    r.margin_over_omega_m = st.margin / params.omega_m;
    if (!st.method_agreement) {
      throw Error(ErrorKind::internal_consistency, "Routh-Hurwitz and eigenvalue stability verdicts disagree");
    }
    r.stable = st.stable;
    if (!st.stable) return r;

    const double n_m = thermal_occupancy(params.temperature, params.omega_m);
    const DiffusionMatrix diffusion = build_diffusion(params.gamma_m, n_m, cavity.kappa_tilde);
    const LyapunovSolution sol = solve_lyapunov(drift, diffusion);
    r.lyapunov_residual = sol.residual;
    if (!(sol.residual <= lyapunov_residual_limit)) {
      throw Error(ErrorKind::internal_consistency, "Lyapunov residual above tolerance");
    }
    const PhysicalityReport phys = physicality(sol.covariance);
    r.nu_tilde_min = phys.nu_tilde_min;
    if (!phys.physical) throw Error(ErrorKind::invalid_covariance, "steady-state covariance violates the uncertainty bound");
    const EntanglementResult ent = log_negativity(sol.covariance);
    const SqueezingResult sq = squeezing_degrees(sol.covariance);
    r.nu_minus = ent.nu_minus;
    r.e_n = ent.e_n;
    r.sigma_q = sq.sigma_q;
    r.sigma_p = sq.sigma_p;
    r.s_q = sq.s_q;
    r.s_p = sq.s_p;
  } catch (const Error& e) {
    fail(e);
  }
  return r;
}

struct SweepTable {
  std::vector<std::string> axis_names;
  std::vector<ResultRecord> rows;
};

/// Evaluates the grid in row-major order (axis1 outer). Points run on up to
/// `workers` threads; the row order never depends on scheduling.
inline SweepTable run_sweep(const SweepSpec& spec, unsigned workers = 1) {
  validate(spec);
  SweepTable table;
  table.axis_names.emplace_back(to_string(spec.axis1.parameter));
  if (spec.axis2) table.axis_names.emplace_back(to_string(spec.axis2->parameter));
  const std::size_t inner = spec.axis2 ? spec.axis2->count : 1;
  const std::size_t total = spec.size();
  table.rows.resize(total);

  auto evaluate = [&](std::size_t index) {
    SystemConfig c = spec.base;
    const std::size_t i = index / inner;
    const std::size_t j = index % inner;
    std::vector<double> coords{spec.axis1.value(i)};
    apply(c, spec.axis1.parameter, coords[0]);
    if (spec.axis2) {
      coords.push_back(spec.axis2->value(j));
      apply(c, spec.axis2->parameter, coords[1]);
    }
    ResultRecord rec = run_point(c, spec.options);
    rec.axis_values = std::move(coords);
    table.rows[index] = std::move(rec);
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (workers == 1) {
    for (std::size_t k = 0; k < total; ++k) evaluate(k);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) evaluate(k);
    });
  }
  for (auto& t : pool) t.join();
  return table;
}

/// Index of the row maximizing `field` among rows where it is present.
template <typename Getter>
std::optional<std::size_t> grid_argmax(const SweepTable& table, Getter field) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::optional<double> v = field(table.rows[i]);
    if (!v) continue;
    if (!best || *v > *field(table.rows[*best])) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 14> preset_ids{"fig2a", "fig2b", "fig3a", "fig3b", "fig3c",
                                                              "fig3d", "fig3e", "fig3f", "fig4a", "fig4b",
                                                              "fig4c", "fig4d", "fig4e", "fig4f"};

/// Entanglement study base (mechanics 10 MHz, κ₁ = κ₂, T = 10 mK).
inline SystemConfig entanglement_base() { return SystemConfig{}; }

/// Squeezing study base: asymmetric mirrors and a colder bath.
inline SystemConfig squeezing_base() {
  SystemConfig c;
  c.kappa1_hz = 2.25e6;
  c.kappa2_hz = 0.75e6;
  c.temperature_mk = 1.0;
  c.delta_over_omega_m = 0.1;
  return c;
}

struct PresetResolution {
  std::size_t points_1d = 401;
  std::size_t points_2d = 101;
};

inline SweepSpec preset(std::string_view id, PresetResolution res = {}) {
  using P = SweepParameter;
  constexpr double two_pi = constants::two_pi;
  const std::size_t n1 = res.points_1d;
  const std::size_t n2 = res.points_2d;
  SweepSpec s;
  s.base = entanglement_base();
  auto axis = [](P p, double a, double b, std::size_t n) { return Axis{p, a, b, n}; };

  if (id == "fig2a") {
    s.base.delta_over_omega_m = 0.25;
    s.axis1 = axis(P::g2_over_g1, -1e-3, 1e-3, n1);
    s.options.outputs = OutputLevel::steady_only;
  } else if (id == "fig2b") {
    s.axis1 = axis(P::r_b, 0.0, 0.99, n2);
    s.axis2 = axis(P::theta, 0.0, two_pi, n2);
    s.options.outputs = OutputLevel::eta_only;
  } else if (id == "fig3a" || id == "fig3b") {
    if (id == "fig3b") {
      s.base.r_b = 0.2;
      s.base.theta_rad = 1.5 * constants::pi;
    }
    s.axis1 = axis(P::g2_over_g1, 0.0, 6e-5, 5);
    s.axis2 = axis(P::delta, 0.0, 1.5, n1);
  } else if (id == "fig3c") {
    s.base.r_b = 0.5;
    s.base.g2_over_g1 = 3e-5;
    s.axis1 = axis(P::delta, 0.0, 1.5, n2);
    s.axis2 = axis(P::theta, 0.0, two_pi, n2);
  } else if (id == "fig3d") {
    s.base.delta_over_omega_m = 0.25;
    s.base.theta_rad = 1.5 * constants::pi;
    s.axis1 = axis(P::g2_over_g1, 0.0, 1e-4, n2);
    s.axis2 = axis(P::r_b, 0.0, 0.95, n2);
  } else if (id == "fig3e") {
    s.base.delta_over_omega_m = 0.25;
    s.base.g2_over_g1 = 1.5e-5;
    s.axis1 = axis(P::r_b, 0.0, 0.95, n2);
    s.axis2 = axis(P::theta, 0.0, two_pi, n2);
  } else if (id == "fig3f") {
    s.base.delta_over_omega_m = 0.25;
    s.base.r_b = 0.7;
    s.axis1 = axis(P::g2_over_g1, 0.0, 1e-4, n2);
    s.axis2 = axis(P::theta, 0.0, two_pi, n2);
  } else if (id == "fig4a" || id == "fig4b") {
    s.base = squeezing_base();
    if (id == "fig4b") s.base.r_b = 0.8;
    s.axis1 = axis(P::g2_over_g1, 0.0, -1e-3, 2);
    s.axis2 = axis(P::delta, -1.0, 1.0, n1);
  } else if (id == "fig4c") {
    s.base = squeezing_base();
    s.axis1 = axis(P::r_b, 0.0, 0.8, 2);
    s.axis2 = axis(P::g2_over_g1, -2e-2, 2e-2, n1);
  } else if (id == "fig4d") {
    s.base = squeezing_base();
    s.base.g2_over_g1 = -1e-3;
    s.axis1 = axis(P::r_b, 0.0, 0.95, n2);
    s.axis2 = axis(P::theta, 0.0, two_pi, n2);
  } else if (id == "fig4e") {
    s.base = squeezing_base();
    s.base.r_b = 0.8;
    s.base.g2_over_g1 = -1e-3;
    s.axis1 = axis(P::delta, -1.0, 1.0, n2);
    s.axis2 = axis(P::theta, 0.0, two_pi, n2);
  } else if (id == "fig4f") {
    s.base = squeezing_base();
    s.base.r_b = 0.8;
    s.axis1 = axis(P::delta, -1.0, 1.0, n2);
    s.axis2 = axis(P::g2_over_g1, -2e-2, 0.0, n2);
  } else {
    throw Error(ErrorKind::configuration, "unknown preset '" + std::string(id) + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 17> record_columns{
    "eta",           "stable",       "e_n",           "s_q",
    "s_p",           "nu_minus",     "nu_tilde_min",  "sigma_q",
    "sigma_p",       "omega_eff_over_omega_m", "photon_number", "delta_bar_over_omega_m",
    "margin_over_omega_m", "lyapunov_residual", "branch_count", "error_kind",
    "error"};

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace detail

inline void write_csv(std::ostream& out, const SweepTable& table) {
  bool first = true;
  for (const auto& name : table.axis_names) {
    out << (first ? "" : ",") << name;
    first = false;
  }
  for (auto col : record_columns) {
    out << (first ? "" : ",") << col;
    first = false;
  }
  out << '\n';
  for (const auto& r : table.rows) {
    std::vector<std::string> cells;
    for (double v : r.axis_values) cells.push_back(format_double(v));
    cells.push_back(detail::cell(r.eta));
    cells.push_back(r.stable ? (*r.stable ? "true" : "false") : "");
    cells.push_back(detail::cell(r.e_n));
    cells.push_back(detail::cell(r.s_q));
    cells.push_back(detail::cell(r.s_p));
    cells.push_back(detail::cell(r.nu_minus));
    cells.push_back(detail::cell(r.nu_tilde_min));
    cells.push_back(detail::cell(r.sigma_q));
    cells.push_back(detail::cell(r.sigma_p));
    cells.push_back(detail::cell(r.omega_eff_over_omega_m));
    cells.push_back(detail::cell(r.photon_number));
    cells.push_back(detail::cell(r.delta_bar_over_omega_m));
    cells.push_back(detail::cell(r.margin_over_omega_m));
    cells.push_back(detail::cell(r.lyapunov_residual));
    cells.push_back(r.branch_count ? std::to_string(*r.branch_count) : "");
    cells.push_back(r.error_kind ? std::string(to_string(*r.error_kind)) : "");
    cells.push_back(detail::csv_escape(r.error));
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
}

inline json to_json(const ResultRecord& r, const std::vector<std::string>& axis_names) {
  json j;
  for (std::size_t i = 0; i < axis_names.size() && i < r.axis_values.size(); ++i) j[axis_names[i]] = r.axis_values[i];
  auto put = [&j](const char* key, const std::optional<double>& v) {
    j[key] = v ? json(*v) : json(nullptr);
  };
  put("eta", r.eta);
  j["stable"] = r.stable ? json(*r.stable) : json(nullptr);
  put("e_n", r.e_n);
  put("s_q", r.s_q);
  put("s_p", r.s_p);
  put("nu_minus", r.nu_minus);
  put("nu_tilde_min", r.nu_tilde_min);
  put("sigma_q", r.sigma_q);
  put("sigma_p", r.sigma_p);
  put("omega_eff_over_omega_m", r.omega_eff_over_omega_m);
  put("photon_number", r.photon_number);
  put("delta_bar_over_omega_m", r.delta_bar_over_omega_m);
  put("margin_over_omega_m", r.margin_over_omega_m);
  put("lyapunov_residual", r.lyapunov_residual);
  j["branch_count"] = r.branch_count ? json(*r.branch_count) : json(nullptr);
  j["error_kind"] = r.error_kind ? json(std::string(to_string(*r.error_kind))) : json(nullptr);
  j["error"] = r.error;
  return j;
}

inline void write_json(std::ostream& out, const SweepTable& table) {
  json arr = json::array();
  for (const auto& r : table.rows) arr.push_back(to_json(r, table.axis_names));
  out << arr.dump(2) << '\n';
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw Error(ErrorKind::configuration, "unknown output format '" + std::string(s) + "'");
}

inline std::string render(const SweepTable& table, OutputFormat format) {
  std::ostringstream ss;
  if (format == OutputFormat::csv) {
    write_csv(ss, table);
  } else {
    write_json(ss, table);
  }
  return ss.str();
}

/// Writes the table to `path`; I/O failures raise ErrorKind::io.
inline void emit(const SweepTable& table, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << render(table, format);
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

}  // namespace optomech
