#pragma once

// Flat JSON configuration documents. Frequencies are written as f = ω/2π in
// Hz and converted to rad/s on the way in.

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/membrane_coupling.hpp"
#include "optomech/physical_model.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

using json = nlohmann::ordered_json;

enum class G1Convention {
  hz_times_2pi,  ///< g1 is an ordinary frequency; g_1 = 2π·g1
  rad_per_s,     ///< g1 is already angular
};

inline std::string_view to_string(G1Convention c) {
  return c == G1Convention::rad_per_s ? "rad_per_s" : "hz_times_2pi";
}

inline G1Convention parse_g1_convention(std::string_view s) {
  if (s == "rad_per_s") return G1Convention::rad_per_s;
  if (s == "hz_times_2pi") return G1Convention::hz_times_2pi;
  throw Error(ErrorKind::configuration, "unknown g1 convention '" + std::string(s) + "'");
}

inline std::string_view to_string(DetuningMode m) {
  switch (m) {
    case DetuningMode::delta_c: return "delta_c";
    case DetuningMode::delta_bar: return "delta_bar";
    case DetuningMode::delta_tilde: return "delta_tilde";
  }
  return "delta_c";
}

inline DetuningMode parse_detuning_mode(std::string_view s) {
  if (s == "delta_c") return DetuningMode::delta_c;
  if (s == "delta_bar") return DetuningMode::delta_bar;
  if (s == "delta_tilde") return DetuningMode::delta_tilde;
  throw Error(ErrorKind::configuration, "unknown detuning mode '" + std::string(s) + "'");
}

/// The system configuration exactly as written in a config file.
struct SystemConfig {
  double omega_m_hz = 10e6;
  double gamma_m_hz = 100.0;
  double kappa1_hz = 1.5e6;
  double kappa2_hz = 1.5e6;
  double g1 = 1351.38;
  G1Convention g1_convention = G1Convention::rad_per_s;
  double g2_over_g1 = 0.0;
  double wavelength_nm = 810.0;
  double power_mw = 5.0;
  double temperature_mk = 10.0;
  double delta_over_omega_m = 0.6;
  DetuningMode detuning_mode = DetuningMode::delta_c;
  double r_b = 0.0;
  double theta_rad = 0.0;
};

inline constexpr std::array<std::string_view, 14> system_config_keys{
    "omega_m_hz", "gamma_m_hz",   "kappa1_hz",     "kappa2_hz",          "g1",            "g1_convention", "g2_over_g1",
    "wavelength_nm", "power_mw", "temperature_mk", "delta_over_omega_m", "detuning_mode", "r_b",           "theta_rad"};

namespace detail {

template <typename T>
T read_field(const json& doc, std::string_view key, T fallback) {
  const auto it = doc.find(std::string(key));
  if (it == doc.end()) return fallback;
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::configuration, "key '" + std::string(key) + "' has the wrong type");
  }
}

inline void reject_unknown_keys(const json& doc, std::span<const std::string_view> allowed) {
  if (!doc.is_object()) throw Error(ErrorKind::configuration, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::configuration, "unknown config key '" + key + "'");
    }
  }
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::configuration, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Keys missing from `doc` keep their value from `base`; unknown keys are an
/// error naming the key.
inline SystemConfig parse_system_config(const json& doc, const SystemConfig& base = {}) {
  detail::reject_unknown_keys(doc, system_config_keys);
  SystemConfig c = base;
  c.omega_m_hz = detail::read_field(doc, "omega_m_hz", c.omega_m_hz);
  c.gamma_m_hz = detail::read_field(doc, "gamma_m_hz", c.gamma_m_hz);
  c.kappa1_hz = detail::read_field(doc, "kappa1_hz", c.kappa1_hz);
  c.kappa2_hz = detail::read_field(doc, "kappa2_hz", c.kappa2_hz);
  c.g1 = detail::read_field(doc, "g1", c.g1);
  c.g1_convention =
      parse_g1_convention(detail::read_field<std::string>(doc, "g1_convention", std::string(to_string(c.g1_convention))));
  c.g2_over_g1 = detail::read_field(doc, "g2_over_g1", c.g2_over_g1);
  c.wavelength_nm = detail::read_field(doc, "wavelength_nm", c.wavelength_nm);
  c.power_mw = detail::read_field(doc, "power_mw", c.power_mw);
  c.temperature_mk = detail::read_field(doc, "temperature_mk", c.temperature_mk);
  c.delta_over_omega_m = detail::read_field(doc, "delta_over_omega_m", c.delta_over_omega_m);
  c.detuning_mode =
      parse_detuning_mode(detail::read_field<std::string>(doc, "detuning_mode", std::string(to_string(c.detuning_mode))));
  c.r_b = detail::read_field(doc, "r_b", c.r_b);
  c.theta_rad = detail::read_field(doc, "theta_rad", c.theta_rad);
  return c;
}

inline SystemConfig parse_system_config(const std::string& text) {
  return parse_system_config(detail::parse_json_text(text));
}

inline SystemConfig load_system_config(const std::string& path, const SystemConfig& base = {}) {
  return parse_system_config(detail::parse_json_text(detail::read_file(path)), base);
}

inline json to_json(const SystemConfig& c) {
  json j;
  j["omega_m_hz"] = c.omega_m_hz;
  j["gamma_m_hz"] = c.gamma_m_hz;
  j["kappa1_hz"] = c.kappa1_hz;
  j["kappa2_hz"] = c.kappa2_hz;
  j["g1"] = c.g1;
  j["g1_convention"] = to_string(c.g1_convention);
  j["g2_over_g1"] = c.g2_over_g1;
  j["wavelength_nm"] = c.wavelength_nm;
  j["power_mw"] = c.power_mw;
  j["temperature_mk"] = c.temperature_mk;
  j["delta_over_omega_m"] = c.delta_over_omega_m;
  j["detuning_mode"] = to_string(c.detuning_mode);
  j["r_b"] = c.r_b;
  j["theta_rad"] = c.theta_rad;
  return j;
}

inline double g1_angular(double g1, G1Convention convention) {
  return convention == G1Convention::hz_times_2pi ? angular_from_hz(g1) : g1;
}

/// Converts to internal units and validates.
inline PhysicalParams to_physical_params(const SystemConfig& c) {
  PhysicalParams p;
  p.omega_m = angular_from_hz(c.omega_m_hz);
  p.gamma_m = angular_from_hz(c.gamma_m_hz);
  p.kappa_1 = angular_from_hz(c.kappa1_hz);
  p.kappa_2 = angular_from_hz(c.kappa2_hz);
  p.g_1 = g1_angular(c.g1, c.g1_convention);
  p.g_2 = c.g2_over_g1 * p.g_1;
  p.drive_wavelength = c.wavelength_nm * 1e-9;
  p.drive_power = c.power_mw * 1e-3;
  p.temperature = c.temperature_mk * 1e-3;
  p.detuning = c.delta_over_omega_m * p.omega_m;
  p.r_b = c.r_b;
  p.theta = c.theta_rad;
  validate(p);
  return p;
}

// ---------------------------------------------------------------------------
// Membrane geometry
// ---------------------------------------------------------------------------

struct GeometryConfig {
  double reflectivity = 0.0;
  double equilibrium_position_nm = 0.0;
  double half_length_mm = 0.0;
  int mode_number = 1;
  std::optional<double> omega_m_hz;  ///< only used for the adiabaticity warning
};

inline constexpr std::array<std::string_view, 5> geometry_config_keys{
    "reflectivity", "equilibrium_position_nm", "half_length_mm", "mode_number", "omega_m_hz"};

inline GeometryConfig parse_geometry_config(const json& doc) {
  detail::reject_unknown_keys(doc, geometry_config_keys);
  for (std::string_view key : {"reflectivity", "equilibrium_position_nm", "half_length_mm", "mode_number"}) {
    if (!doc.contains(std::string(key))) {
      throw Error(ErrorKind::configuration, "missing geometry key '" + std::string(key) + "'");
    }
  }
  GeometryConfig g;
  g.reflectivity = detail::read_field(doc, "reflectivity", g.reflectivity);
  g.equilibrium_position_nm = detail::read_field(doc, "equilibrium_position_nm", g.equilibrium_position_nm);
  g.half_length_mm = detail::read_field(doc, "half_length_mm", g.half_length_mm);
  g.mode_number = detail::read_field(doc, "mode_number", g.mode_number);
  if (doc.contains("omega_m_hz")) g.omega_m_hz = detail::read_field(doc, "omega_m_hz", 0.0);
  return g;
}

inline GeometryConfig load_geometry_config(const std::string& path) {
  return parse_geometry_config(detail::parse_json_text(detail::read_file(path)));
}

inline MembraneGeometry to_geometry(const GeometryConfig& c) {
  MembraneGeometry g;
  g.reflectivity = c.reflectivity;
  g.equilibrium_position = c.equilibrium_position_nm * 1e-9;
  g.half_length = c.half_length_mm * 1e-3;
  g.mode_number = c.mode_number;
  return g;
}

}  // namespace optomech
