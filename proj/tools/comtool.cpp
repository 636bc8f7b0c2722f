// comtool: command-line front end for the membrane optomechanics library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "optomech/optomech.hpp"

namespace {

using namespace optomech;

enum ExitCode { exit_ok = 0, exit_config = 1, exit_io = 2, exit_internal = 3 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return exit_io;
    case ErrorKind::internal_consistency: return exit_internal;
    default: return exit_config;
  }
}

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::string detuning_mode;
  std::string g1_convention;
  std::string branch = "lowest";
  bool feedback_in_mean_field = false;
  unsigned workers = 1;
};

BranchSelection parse_branch(const std::string& s) {
  if (s == "lowest") return {BranchRule::lowest, 0};
  if (s == "highest") return {BranchRule::highest, 0};
  try {
    std::size_t used = 0;
    const long long k = std::stoll(s, &used);
    if (used == s.size() && k >= 0) return {BranchRule::index, static_cast<std::size_t>(k)};
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::configuration, "branch must be lowest, highest or a nonnegative index");
}

/// Config file (if any) with command-line overrides applied.
SystemConfig system_config(const CommonOptions& o, SystemConfig base = {}) {
  SystemConfig c = o.config_path.empty() ? base : load_system_config(o.config_path);
  if (!o.detuning_mode.empty()) c.detuning_mode = parse_detuning_mode(o.detuning_mode);
  if (!o.g1_convention.empty()) c.g1_convention = parse_g1_convention(o.g1_convention);
  return c;
}

PointOptions point_options(const CommonOptions& o) {
  PointOptions p;
  p.branch = parse_branch(o.branch);
  p.feedback_in_mean_field = o.feedback_in_mean_field;
  return p;
}

MeanFieldOptions mean_field_options(const CommonOptions& o, const SystemConfig& c) {
  MeanFieldOptions m;
  m.detuning_mode = c.detuning_mode;
  m.branch = parse_branch(o.branch);
  m.feedback_in_mean_field = o.feedback_in_mean_field;
  return m;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

json matrix_json(const Matrix4& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

int cmd_couplings(const CommonOptions& o) {
  if (o.config_path.empty()) throw Error(ErrorKind::configuration, "couplings needs --config <geometry.json>");
  const GeometryConfig gc = load_geometry_config(o.config_path);
  const MembraneGeometry g = to_geometry(gc);
  const auto warnings = check_geometry(g, gc.omega_m_hz ? angular_from_hz(*gc.omega_m_hz) : 0.0);
  const CouplingExpansion e = expand_couplings(g);
  json j;
  j["omega_c"] = e.omega_c;
  j["g_1"] = e.g_1;
  j["g_2"] = e.g_2;
  j["sigma"] = e.sigma;
  j["warnings"] = warnings;
  write_output(j.dump(2) + "\n", o.out_path);
  return exit_ok;
}

int cmd_steady(const CommonOptions& o) {
  const SystemConfig c = system_config(o);
  const PhysicalParams p = to_physical_params(c);
  const EffectiveModel m = solve_mean_field(p, mean_field_options(o, c));
  json j;
  j["alpha_s"] = m.alpha_s;
  j["photon_number"] = m.photon_number;
  j["q_s"] = m.q_s;
  j["p_s"] = m.p_s;
  j["delta_c"] = m.delta_c;
  j["delta_bar"] = m.delta_bar;
  j["omega_eff"] = m.omega_eff;
  j["lambda_eff"] = m.lambda_eff;
  j["branch_count"] = m.branch_count;
  j["selected_branch"] = m.selected_branch;
  json branches = json::array();
  for (const auto& b : m.branches) {
    branches.push_back({{"photon_number", b.photon_number},
                        {"q_s", b.q_s},
                        {"delta_bar", b.delta_bar},
                        {"omega_eff", b.omega_eff}});
  }
  j["branches"] = branches;
  write_output(j.dump(2) + "\n", o.out_path);
  return exit_ok;
}

struct EtaGridOptions {
  bool enabled = false;
  std::size_t r_b_count = 101;
  std::size_t theta_count = 101;
  double r_b_max = 0.99;
};

int cmd_feedback(const CommonOptions& o, const EtaGridOptions& grid, std::optional<double> loop_length) {
  const SystemConfig c = system_config(o);
  const PhysicalParams p = to_physical_params(c);
  if (grid.enabled) {
    const auto surface =
        eta_surface(p.kappa_1, p.kappa_2, 0.0, grid.r_b_max, grid.r_b_count, 0.0, constants::two_pi, grid.theta_count);
    std::ostringstream ss;
    ss << "r_b,theta,eta\n";
    for (const auto& s : surface) {
      ss << format_double(s.r_b) << ',' << format_double(s.theta) << ',' << format_double(s.eta) << '\n';
    }
    write_output(ss.str(), o.out_path);
    return exit_ok;
  }
  const EffectiveModel m = solve_mean_field(p, mean_field_options(o, c));
  const FeedbackLoop loop = make_feedback_loop(p.r_b, p.theta);
  const EffectiveCavity cav = effective_cavity(p.kappa_1, p.kappa_2, loop, m.delta_bar);
  json j;
  j["kappa_tilde"] = cav.kappa_tilde;
  j["delta_tilde"] = cav.delta_tilde;
  j["eta"] = cav.eta;
  j["r_b"] = loop.r_b;
  j["t_b"] = loop.t_b;
  j["theta"] = loop.theta;
  j["noise_normalization_residual"] = noise_normalization_residual(p.kappa_1, p.kappa_2, loop);
  if (loop_length) {
    const DelayReport d = delay_validity(*loop_length, cav.kappa_tilde);
    j["delay"] = {{"delay", d.delay}, {"lifetime", d.lifetime}, {"valid", d.valid}};
    if (!d.valid) std::cerr << "warning: loop delay is not small compared with the cavity lifetime\n";
  }
  write_output(j.dump(2) + "\n", o.out_path);
  return exit_ok;
}

int cmd_point(const CommonOptions& o, bool dump_matrices) {
  const SystemConfig c = system_config(o);
  const ResultRecord r = run_point(c, point_options(o));
  json j = to_json(r, {});
  if (dump_matrices && r.stable && *r.stable) {
    const PhysicalParams p = to_physical_params(c);
    const EffectiveModel m = solve_mean_field(p, mean_field_options(o, c));
    const EffectiveCavity cav = effective_cavity(p.kappa_1, p.kappa_2, make_feedback_loop(p.r_b, p.theta), m.delta_bar);
    const DriftMatrix a = build_drift(m, cav, p.gamma_m, p.omega_m);
    const DiffusionMatrix d = build_diffusion(p.gamma_m, thermal_occupancy(p.temperature, p.omega_m), cav.kappa_tilde);
    j["matrices"] = {{"basis", {"dq", "dp", "dX", "dY"}},
                     {"A", matrix_json(a.a)},
                     {"D", matrix_json(d.d)},
                     {"V", matrix_json(solve_lyapunov(a, d).covariance.v)}};
  }
  write_output(j.dump(2) + "\n", o.out_path);
  if (r.error_kind) return exit_code_for(*r.error_kind);
  return exit_ok;
}

int finish_sweep(const SweepTable& table, const CommonOptions& o) {
  write_output(render(table, parse_output_format(o.format)), o.out_path);
  for (const auto& row : table.rows) {
    if (row.error_kind == ErrorKind::internal_consistency) return exit_internal;
  }
  return exit_ok;
}

int cmd_sweep(const CommonOptions& o, const std::string& axis1, const std::string& axis2) {
  SweepSpec spec;
  spec.base = system_config(o);
  spec.axis1 = parse_axis(axis1);
  if (!axis2.empty()) spec.axis2 = parse_axis(axis2);
  spec.options = point_options(o);
  parse_output_format(o.format);
  return finish_sweep(run_sweep(spec, o.workers), o);
}

int cmd_preset(const CommonOptions& o, const std::string& id, PresetResolution res) {
  SweepSpec spec = preset(id, res);
  if (!o.config_path.empty()) spec.base = load_system_config(o.config_path, spec.base);
  if (!o.detuning_mode.empty()) spec.base.detuning_mode = parse_detuning_mode(o.detuning_mode);
  if (!o.g1_convention.empty()) spec.base.g1_convention = parse_g1_convention(o.g1_convention);
  const OutputLevel level = spec.options.outputs;
  spec.options = point_options(o);
  spec.options.outputs = level;
  parse_output_format(o.format);
  return finish_sweep(run_sweep(spec, o.workers), o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state entanglement and squeezing of a membrane-in-the-middle cavity with coherent feedback"};
  app.require_subcommand(1);
  CommonOptions o;

  auto add_common = [&o](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    cmd->add_option("--detuning-mode", o.detuning_mode, "delta_c | delta_bar | delta_tilde")
        ->check(CLI::IsMember({"delta_c", "delta_bar", "delta_tilde"}));
    cmd->add_option("--g1-convention", o.g1_convention, "hz_times_2pi | rad_per_s")
        ->check(CLI::IsMember({"hz_times_2pi", "rad_per_s"}));
    cmd->add_option("--branch", o.branch, "mean-field branch: lowest | highest | <index>");
    cmd->add_flag("--feedback-in-mean-field", o.feedback_in_mean_field, "let the loop also modify the mean field");
  };
  auto add_table = [&o](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1u, 1024u));
  };

  auto* couplings = app.add_subcommand("couplings", "expansion coefficients for a membrane geometry");
  couplings->add_option("--config", o.config_path, "geometry JSON")->required();
  couplings->add_option("--out", o.out_path, "output file (default: stdout)");

  auto* steady = app.add_subcommand("steady", "mean-field steady state and all branches");
  add_common(steady);

  auto* feedback = app.add_subcommand("feedback", "feedback-modified cavity parameters");
  add_common(feedback);
  EtaGridOptions grid;
  std::optional<double> loop_length;
  feedback->add_flag("--eta-grid", grid.enabled, "emit the decay-ratio surface as CSV");
  feedback->add_option("--rb-count", grid.r_b_count, "r_b grid points")->check(CLI::Range(2, 100000));
  feedback->add_option("--theta-count", grid.theta_count, "theta grid points")->check(CLI::Range(2, 100000));
  feedback->add_option("--rb-max", grid.r_b_max, "largest r_b on the grid")->check(CLI::Range(0.0, 0.999999));
  feedback->add_option("--loop-length", loop_length, "feedback loop length (m) for the delay check");

  auto* point = app.add_subcommand("point", "full pipeline at one parameter set");
  add_common(point);
  bool dump_matrices = false;
  point->add_flag("--dump-matrices", dump_matrices, "include A, D and V");

  auto* sweep = app.add_subcommand("sweep", "1D or 2D grid sweep");
  add_common(sweep);
  add_table(sweep);
  std::string axis1, axis2;
  sweep->add_option("--axis1", axis1, "name:start:stop:count")->required();
  sweep->add_option("--axis2", axis2, "name:start:stop:count");

  auto* preset_cmd = app.add_subcommand("preset", "figure reproduction grid");
  add_common(preset_cmd);
  add_table(preset_cmd);
  std::string preset_id;
  PresetResolution res;
  preset_cmd->add_option("id", preset_id, "preset id (fig2a ... fig4f)")->required();
  preset_cmd->add_option("--points-1d", res.points_1d, "points along 1D axes")->check(CLI::Range(2, 1000000));
  preset_cmd->add_option("--points-2d", res.points_2d, "points per axis of 2D grids")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    if (*couplings) return cmd_couplings(o);
    if (*steady) return cmd_steady(o);
    if (*feedback) return cmd_feedback(o, grid, loop_length);
    if (*point) return cmd_point(o, dump_matrices);
    if (*sweep) return cmd_sweep(o, axis1, axis2);
    if (*preset_cmd) return cmd_preset(o, preset_id, res);
  } catch (const Error& e) {
    std::cerr << "comtool: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "comtool: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_config;
}
