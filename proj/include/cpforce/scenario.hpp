#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpforce/errors.hpp"
#include "cpforce/level_system.hpp"
#include "cpforce/material.hpp"
#include "cpforce/thermal.hpp"

namespace cpforce {

struct GridSpec {
  std::vector<double> points;
};

/// One batch computation: the atom, the surface, the thermodynamic state and
/// the evaluation grids. Keys carry their units explicitly.
struct Scenario {
  std::string name;
  LevelSystem atom;
  Material material;
  Temperature temperature;
  std::vector<double> z_grid;              // meters, ascending
  std::optional<std::vector<double>> time_grid;  // seconds, ascending
  std::string computation;                 // default selector
  double matsubara_rel_tol = 1e-8;
  double quadrature_rel_tol = 1e-10;
  std::optional<double> dilute_eta;        // 1/m^3
  bool self_consistent_shifts = false;
  std::string out_dir = ".";               // overridden by --out
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key,
                           const std::string& context) {
  if (!j.contains(key))
    throw ConfigError("missing field '" + key + "' in " + context,
                      context + "." + key);
  return j.at(key);
}

inline double require_number(const json& j, const std::string& key,
                             const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number())
    throw ConfigError("field '" + key + "' in " + context + " must be a number",
                      context + "." + key);
  return v.get<double>();
}

inline std::vector<double> parse_grid(const json& j, const std::string& context,
                                      const char* start_key,
                                      const char* stop_key) {
  const double start = require_number(j, start_key, context);
  const double stop = require_number(j, stop_key, context);
  const int count = static_cast<int>(require_number(j, "count", context));
  if (count < 1 || stop < start)
    throw ConfigError("grid in " + context + " must be non-empty and ascending",
                      context);
  const std::string spacing = j.value("spacing", "linear");
  std::vector<double> pts(count);
  if (count == 1) {
    pts[0] = start;
  } else if (spacing == "log") {
    if (!(start > 0.0))
      throw ConfigError("log grid in " + context + " needs start > 0", context);
    const double ratio = std::log(stop / start) / (count - 1);
    for (int i = 0; i < count; ++i) pts[i] = start * std::exp(ratio * i);
    pts.back() = stop;
  } else if (spacing == "linear") {
    const double step = (stop - start) / (count - 1);
    for (int i = 0; i < count; ++i) pts[i] = start + step * i;
    pts.back() = stop;
  } else {
    throw ConfigError("unknown spacing '" + spacing + "' in " + context,
                      context + ".spacing");
  }
  return pts;
}

inline Material parse_material(const json& j) {
  const std::string model =
      require(j, "model", "material").get<std::string>();
  if (model == "drude") {
    return Drude{require_number(j, "plasma_frequency_rad_per_s", "material"),
                 require_number(j, "relaxation_rate_rad_per_s", "material")};
  }
  if (model == "plasma") {
    return Plasma{require_number(j, "plasma_frequency_rad_per_s", "material")};
  }
  if (model == "drude_lorentz") {
    DrudeLorentz dl;
    for (const auto& o : require(j, "oscillators", "material")) {
      dl.oscillators.push_back(
          {require_number(o, "strength_rad2_per_s2", "material.oscillators"),
           require_number(o, "resonance_rad_per_s", "material.oscillators"),
           require_number(o, "damping_rad_per_s", "material.oscillators")});
    }
    if (j.contains("drude_part")) {
      const auto& dp = j.at("drude_part");
      dl.drude_part =
          Drude{require_number(dp, "plasma_frequency_rad_per_s",
                               "material.drude_part"),
                require_number(dp, "relaxation_rate_rad_per_s",
                               "material.drude_part")};
    }
    return dl;
  }
  if (model == "perfect_mirror") return PerfectMirror{};
  if (model == "vacuum") return Vacuum{};
  throw ConfigError("unknown material model '" + model + "'", "material.model");
}

inline LevelSystem parse_atom(const json& j) {
  const json& energies = require(j, "energies_J", "atom");
  std::vector<double> e;
  for (const auto& v : energies) e.push_back(v.get<double>());
  const bool isotropic = j.value("isotropic", true);
  std::vector<std::string> labels;
  if (j.contains("labels"))
    for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());

  try {
    if (isotropic) {
      const json& dm = require(j, "dipole_matrix_Cm", "atom");
      std::vector<std::vector<double>> mags;
      for (const auto& row : dm) {
        mags.emplace_back();
        for (const auto& v : row) mags.back().push_back(v.get<double>());
      }
      return LevelSystem::isotropic_from_magnitudes(std::move(e), mags,
                                                    std::move(labels));
    }
    const json& dv = require(j, "dipole_vectors_Cm", "atom");
    std::vector<std::vector<Vec3>> d(e.size(), std::vector<Vec3>(e.size()));
    for (const auto& entry : dv) {
      const int i = entry.at("i").get<int>();
      const int k = entry.at("j").get<int>();
      const auto& vec = entry.at("d");
      d.at(i).at(k) =
          Vec3{vec.at(0).get<double>(), vec.at(1).get<double>(),
               vec.at(2).get<double>()};
    }
    return LevelSystem(std::move(e), std::move(d), false, std::move(labels));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("invalid atom block: ") + ex.what(), "atom");
  }
}

}  // namespace detail

inline const std::vector<std::string>& known_computations() {
  static const std::vector<std::string> v{"force-vs-distance", "dynamics",
                                          "ratio", "rates", "compare",
                                          "dilute-check"};
  return v;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(std::string("parse error: ") + ex.what(), path,
                      static_cast<int>(ex.byte));
  }

  using detail::require;
  Scenario s{
      j.value("name", path),
      detail::parse_atom(require(j, "atom", "config")),
      detail::parse_material(require(j, "material", "config")),
      Temperature(detail::require_number(j, "temperature_K", "config")),
      {},
      std::nullopt,
      j.value("computation", std::string("compare")),
      1e-8,
      1e-10,
      std::nullopt,
      false,
      "."};
  try {
    validate(s.material);
  } catch (const std::domain_error& ex) {
    throw ConfigError(std::string("invalid material block: ") + ex.what(),
                      "material");
  }

  const auto& geom = require(j, "geometry", "config");
  if (geom.contains("z_m")) {
    s.z_grid = {detail::require_number(geom, "z_m", "geometry")};
  } else {
    s.z_grid = detail::parse_grid(geom, "geometry", "z_start_m", "z_stop_m");
  }
  for (double z : s.z_grid)
    if (!(z > 0.0)) throw ConfigError("geometry: z must be > 0", "geometry");

  if (j.contains("time_grid_s"))
    s.time_grid = detail::parse_grid(j.at("time_grid_s"), "time_grid_s",
                                     "start_s", "stop_s");

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    s.matsubara_rel_tol = t.value("matsubara_rel", s.matsubara_rel_tol);
    s.quadrature_rel_tol = t.value("quadrature_rel", s.quadrature_rel_tol);
  }
  if (j.contains("dilute"))
    s.dilute_eta =
        detail::require_number(j.at("dilute"), "eta_per_m3", "dilute");
  s.self_consistent_shifts = j.value("self_consistent_shifts", false);
  if (j.contains("output"))
    s.out_dir = j.at("output").value("dir", s.out_dir);

  bool known = false;
  for (const auto& c : known_computations()) known |= (c == s.computation);
  if (!known)
    throw ConfigError("unknown computation '" + s.computation + "'",
                      "computation");
  return s;
}

}  // namespace cpforce
