#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwork/interferometer.hpp"

namespace qwork {

enum class CheckKind {
  jarzynski,
  crooks,
  route_equivalence,
  decomposition,
  propagator,
  cutoff_doubling
};

inline const char* to_string(CheckKind c) {
  switch (c) {
    case CheckKind::jarzynski:
      return "jarzynski";
    case CheckKind::crooks:
      return "crooks";
    case CheckKind::route_equivalence:
      return "route_equivalence";
    case CheckKind::decomposition:
      return "decomposition";
    case CheckKind::propagator:
      return "propagator";
    case CheckKind::cutoff_doubling:
      return "cutoff_doubling";
  }
  return "?";
}

inline const std::vector<CheckKind>& all_checks() {
  static const std::vector<CheckKind> kinds = {
      CheckKind::jarzynski,         CheckKind::crooks,
      CheckKind::route_equivalence, CheckKind::decomposition,
      CheckKind::propagator,        CheckKind::cutoff_doubling};
  return kinds;
}

inline CheckKind check_from_string(const std::string& name) {
  for (CheckKind c : all_checks()) {
    if (name == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown check: " + name);
}

inline ProtocolVariant variant_from_string(const std::string& name) {
  if (name == "simple") return ProtocolVariant::simple;
  if (name == "general") return ProtocolVariant::general;
  if (name == "appendix") return ProtocolVariant::appendix;
  throw std::invalid_argument("unknown variant: " + name +
                              " (expected simple, general or appendix)");
}

// A full run description: scenario, protocol variant, enabled verification
// checks and optional output destination.
struct RunConfig {
  Scenario scenario;
  ProtocolVariant variant = ProtocolVariant::appendix;
  std::vector<CheckKind> checks = all_checks();
  DephasingModel::DurationRule duration_rule =
      DephasingModel::DurationRule::u_only;
  double dephasing_constant_time = 0.0;
  std::string output_path;

  DephasingModel dephasing() const {
    return {scenario.gamma, duration_rule, dephasing_constant_time};
  }
};

namespace detail {

// Unknown fields are configuration mistakes; reject them instead of
// silently ignoring.
inline void require_known_keys(const nlohmann::json& j,
                               std::initializer_list<const char*> allowed,
                               const char* where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string("config: unknown field \"") +
                                  item.key() + "\" in " + where);
    }
  }
}

inline double number_at(const nlohmann::json& j, const char* key) {
  if (!j.at(key).is_number()) {
    throw std::invalid_argument(std::string("config: field \"") + key +
                                "\" must be a number");
  }
  return j.at(key).get<double>();
}

}  // namespace detail

inline DriveProfile parse_drive(const nlohmann::json& j) {
  detail::require_known_keys(
      j, {"kind", "lambda_final", "ramp_rate", "table"}, "drive");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sudden") {
    return DriveProfile::sudden(detail::number_at(j, "lambda_final"));
  }
  if (kind == "constant") {
    return DriveProfile::constant(detail::number_at(j, "lambda_final"));
  }
  if (kind == "tanh_ramp") {
    return DriveProfile::tanh_ramp(detail::number_at(j, "lambda_final"),
                                   detail::number_at(j, "ramp_rate"));
  }
  if (kind == "tabulated") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : j.at("table")) {
      if (!row.is_array() || row.size() != 2) {
        throw std::invalid_argument(
            "config: drive table rows must be [t, lambda] pairs");
      }
      samples.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return DriveProfile::tabulated(std::move(samples));
  }
  throw std::invalid_argument("config: unknown drive kind \"" + kind + "\"");
}

inline std::vector<double> parse_u_grid(const nlohmann::json& j) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (const auto& v : j) grid.push_back(v.get<double>());
    return grid;
  }
  if (j.is_object()) {
    detail::require_known_keys(j, {"start", "stop", "step"}, "u_grid");
    const double start = detail::number_at(j, "start");
    const double stop = detail::number_at(j, "stop");
    const double step = detail::number_at(j, "step");
    if (!(step > 0.0) || stop < start) {
      throw std::invalid_argument(
          "config: u_grid needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long>((stop - start) / step + 0.5) + 1;
    for (long i = 0; i < count; ++i) grid.push_back(start + double(i) * step);
    return grid;
  }
  throw std::invalid_argument(
      "config: u_grid must be an array or {start, stop, step}");
}

inline Scenario parse_scenario(const nlohmann::json& j) {
  detail::require_known_keys(j,
                             {"omega", "beta", "nbar", "phi", "tau", "gamma",
                              "cutoff", "drive", "u_grid"},
                             "scenario");
  Scenario sc;
  if (j.contains("omega")) sc.omega = detail::number_at(j, "omega");
  if (j.contains("nbar")) {
    sc.nbar = detail::number_at(j, "nbar");
    sc.beta = beta_from_nbar(*sc.nbar, sc.omega);
  }
  if (j.contains("beta")) sc.beta = detail::number_at(j, "beta");
  if (!j.contains("beta") && !j.contains("nbar")) {
    throw std::invalid_argument(
        "config: scenario needs \"beta\" or \"nbar\"");
  }
  if (j.contains("phi")) sc.phi = detail::number_at(j, "phi");
  if (j.contains("tau")) sc.tau = detail::number_at(j, "tau");
  if (j.contains("gamma")) sc.gamma = detail::number_at(j, "gamma");
  if (j.contains("cutoff")) {
    sc.cutoff = j.at("cutoff").get<Eigen::Index>();
  }
  if (j.contains("drive")) sc.drive = parse_drive(j.at("drive"));
  if (j.contains("u_grid")) sc.u_grid = parse_u_grid(j.at("u_grid"));
  sc.validate();
  return sc;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  detail::require_known_keys(
      j, {"scenario", "variant", "checks", "dephasing", "output_path"},
      "config");
  RunConfig config;
  config.scenario = parse_scenario(j.at("scenario"));
  if (j.contains("variant")) {
    config.variant = variant_from_string(j.at("variant").get<std::string>());
  }
  if (j.contains("checks")) {
    config.checks.clear();
    for (const auto& name : j.at("checks")) {
      config.checks.push_back(check_from_string(name.get<std::string>()));
    }
  }
  if (j.contains("dephasing")) {
    const auto& d = j.at("dephasing");
    detail::require_known_keys(d, {"duration_rule", "constant_time"},
                               "dephasing");
    if (d.contains("duration_rule")) {
      const std::string rule = d.at("duration_rule").get<std::string>();
      if (rule == "u_only") {
        config.duration_rule = DephasingModel::DurationRule::u_only;
      } else if (rule == "u_plus_constant") {
        config.duration_rule = DephasingModel::DurationRule::u_plus_constant;
      } else {
        throw std::invalid_argument("config: unknown duration_rule \"" +
                                    rule + "\"");
      }
    }
    if (d.contains("constant_time")) {
      config.dephasing_constant_time = detail::number_at(d, "constant_time");
    }
  }
  if (j.contains("output_path")) {
    config.output_path = j.at("output_path").get<std::string>();
  }
  return config;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument("config parse error in " + path + ": " +
                                err.what());
  }
  return parse_run_config(j);
}

// The driven-oscillator reference setting: thermal occupation 1, ramp to
// 0.1 omega over tau = 10/omega, dephasing at half the oscillator frequency.
inline RunConfig preset_fig2c() {
  RunConfig config;
  config.scenario = Scenario::with_nbar(1.0);
  config.scenario.tau = 10.0;
  config.scenario.gamma = 0.5;
  config.scenario.cutoff = 64;
  config.scenario.drive = DriveProfile::tanh_ramp(0.1, 1.0);
  config.scenario.u_grid.clear();
  for (int i = 0; i <= 400; ++i) {
    config.scenario.u_grid.push_back(double(i) * 0.05);
  }
  config.variant = ProtocolVariant::appendix;
  return config;
}

inline RunConfig preset_by_name(const std::string& name) {
  if (name == "fig2c") return preset_fig2c();
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace qwork
