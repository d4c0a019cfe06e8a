/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iondet/core.hpp"
#include "iondet/errors.hpp"
#include "iondet/spectral.hpp"

namespace iondet::harness {

inline constexpr int kSchemaVersion = 1;

enum class ModelKind { Inefficient, FalseCount };

inline std::string to_string(ModelKind m) {
  return m == ModelKind::Inefficient ? "inefficient" : "false_count";
}

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + key + "' in " + context);
  }
}

inline const json& require(const json& obj, const char* key,
                           const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("missing key '" + std::string(key) + "' in " + context);
  return *it;
}

inline double as_double(const json& j, const std::string& context) {
  if (!j.is_number())
    throw ConfigError(context + " must be a number");
  return j.get<double>();
}

inline complexd as_complex(const json& j, const std::string& context) {
  if (j.is_number())
    return complexd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return complexd(j[0].get<double>(), j[1].get<double>());
  throw ConfigError(context + " must be a number or an [re, im] pair");
}

inline CMatrix as_matrix(const json& j, Eigen::Index dim,
                         const std::string& context) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
    throw ConfigError(context + " must be a " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " matrix");
  CMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
      throw ConfigError(context + " row " + std::to_string(r) +
                        " has the wrong length");
    for (Eigen::Index c = 0; c < dim; ++c)
      m(r, c) = as_complex(row[c], context);
  }
  return m;
}

} // namespace detail

struct GridConfig {
  int n_modes;
  double e_min;
  double e_max;

  ContinuumGrid to_grid() const {
    return ContinuumGrid::uniform(n_modes, e_min, e_max);
  }
};

struct DetectorConfig {
  double eps_e = 0.0;
  double eps_g = 0.0;
  double coupling_e = 0.0;
  double coupling_g = 0.0;
  double time = 0.0;

  DetectorSpec to_spec(Zone zone) const {
    DetectorSpec spec{eps_e, eps_g, coupling_e, coupling_g, zone, time};
    spec.validate();
    return spec;
  }
};

struct StateConfig {
  std::optional<std::string> preset;
  Eigen::Index dim = 2;
  std::optional<CMatrix> rho_ee, rho_eg, rho_gg;
  bool normalize = true;

  AtomCavityState to_state() const {
    const CavitySpace space(dim);
    if (preset) {
      if (*preset == "eq-inicial2")
        return entangled_pair_state(space.dim);
      throw ConfigError("unknown state preset '" + *preset + "'");
    }
    const CMatrix zero = CMatrix::Zero(space.dim, space.dim);
    return AtomCavityState::make(rho_ee.value_or(zero), rho_eg.value_or(zero),
                                 rho_gg.value_or(zero), normalize);
  }
};

struct SweepConfig {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;

  std::vector<double> values() const {
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i)
      v[i] = from + (to - from) * i / (steps - 1);
    return v;
  }
};

struct EfficiencyPair {
  double p_e;
  double p_g;
};

/// Parsed scenario configuration; which sections are required depends on the
/// subcommand consuming it.
struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  ModelKind model = ModelKind::Inefficient;
  std::optional<GridConfig> grid;
  std::optional<DetectorConfig> detector_de;
  std::optional<DetectorConfig> detector_dg;
  std::optional<EfficiencyPair> efficiencies;
  std::optional<StateConfig> state;
  std::optional<SweepConfig> sweep;
  std::vector<double> fig1_tr_gg = {0.01, 0.5, 0.99};
  std::optional<std::int64_t> n_atoms;
  std::uint64_t rng_seed = 0;
  std::optional<std::string> output;

  static ScenarioConfig parse(const nlohmann::json& root);
  static ScenarioConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json root;
    try {
      in >> root;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse(root);
  }
};

inline ScenarioConfig ScenarioConfig::parse(const nlohmann::json& root) {
  using detail::as_double;
  using detail::require;
  using detail::require_keys;

  if (!root.is_object())
    throw ConfigError("config root must be a JSON object");
  require_keys(root, "config",
               {"schema_version", "model", "grid", "detector_de",
                "detector_dg", "efficiencies", "state", "sweep", "fig1",
                "sample", "rng_seed", "output"});

  ScenarioConfig cfg;
  const auto& ver = require(root, "schema_version", "config");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema_version (expected " +
                      std::to_string(kSchemaVersion) + ")");

  if (auto it = root.find("model"); it != root.end()) {
    const std::string m = it->get<std::string>();
    if (m == "inefficient")
      cfg.model = ModelKind::Inefficient;
    else if (m == "false_count")
      cfg.model = ModelKind::FalseCount;
    else
      throw ConfigError("model must be 'inefficient' or 'false_count'");
  }

  if (auto it = root.find("grid"); it != root.end()) {
    require_keys(*it, "grid", {"n_modes", "e_min", "e_max"});
    GridConfig g{};
    const auto& n = require(*it, "n_modes", "grid");
    if (!n.is_number_integer() || n.get<int>() < 3)
      throw ConfigError("grid.n_modes must be an integer >= 3");
    g.n_modes = n.get<int>();
    g.e_min = as_double(require(*it, "e_min", "grid"), "grid.e_min");
    g.e_max = as_double(require(*it, "e_max", "grid"), "grid.e_max");
    if (!(g.e_max > g.e_min))
      throw ConfigError("grid.e_max must exceed grid.e_min");
    cfg.grid = g;
  }

  auto parse_detector = [](const nlohmann::json& j,
                           const std::string& context) {
    require_keys(j, context,
                 {"eps_e", "eps_g", "coupling_e", "coupling_g", "time"});
    DetectorConfig d{};
    if (auto it = j.find("eps_e"); it != j.end())
      d.eps_e = as_double(*it, context + ".eps_e");
    if (auto it = j.find("eps_g"); it != j.end())
      d.eps_g = as_double(*it, context + ".eps_g");
    if (auto it = j.find("coupling_e"); it != j.end())
      d.coupling_e = as_double(*it, context + ".coupling_e");
    if (auto it = j.find("coupling_g"); it != j.end())
      d.coupling_g = as_double(*it, context + ".coupling_g");
    if (auto it = j.find("time"); it != j.end())
      d.time = as_double(*it, context + ".time");
    if (d.time < 0)
      throw ConfigError(context + ".time must be non-negative");
    return d;
  };
  if (auto it = root.find("detector_de"); it != root.end())
    cfg.detector_de = parse_detector(*it, "detector_de");
  if (auto it = root.find("detector_dg"); it != root.end())
    cfg.detector_dg = parse_detector(*it, "detector_dg");

  if (auto it = root.find("efficiencies"); it != root.end()) {
    require_keys(*it, "efficiencies", {"p_e", "p_g"});
    EfficiencyPair p{};
    p.p_e = as_double(require(*it, "p_e", "efficiencies"), "efficiencies.p_e");
    p.p_g = as_double(require(*it, "p_g", "efficiencies"), "efficiencies.p_g");
    if (p.p_e < 0 || p.p_e > 1 || p.p_g < 0 || p.p_g > 1)
      throw ConfigError("efficiencies must lie in [0, 1]");
    cfg.efficiencies = p;
  }

  if (auto it = root.find("state"); it != root.end()) {
    require_keys(*it, "state",
                 {"preset", "dim", "rho_ee", "rho_eg", "rho_gg", "normalize"});
    StateConfig s{};
    if (auto d = it->find("dim"); d != it->end()) {
      if (!d->is_number_integer() || d->get<int>() < 1)
        throw ConfigError("state.dim must be a positive integer");
      s.dim = d->get<int>();
    }
    if (auto p = it->find("preset"); p != it->end()) {
      s.preset = p->get<std::string>();
      if (it->contains("rho_ee") || it->contains("rho_eg") ||
          it->contains("rho_gg"))
        throw ConfigError("state accepts either a preset or explicit blocks");
    } else {
      if (auto m = it->find("rho_ee"); m != it->end())
        s.rho_ee = detail::as_matrix(*m, s.dim, "state.rho_ee");
      if (auto m = it->find("rho_eg"); m != it->end())
        s.rho_eg = detail::as_matrix(*m, s.dim, "state.rho_eg");
      if (auto m = it->find("rho_gg"); m != it->end())
        s.rho_gg = detail::as_matrix(*m, s.dim, "state.rho_gg");
      if (!s.rho_ee && !s.rho_gg)
        throw ConfigError("explicit state needs rho_ee or rho_gg");
    }
    if (auto n = it->find("normalize"); n != it->end())
      s.normalize = n->get<bool>();
    cfg.state = s;
  }

  if (auto it = root.find("sweep"); it != root.end()) {
    require_keys(*it, "sweep", {"parameter", "from", "to", "steps"});
    SweepConfig s{};
    s.parameter = require(*it, "parameter", "sweep").get<std::string>();
    s.from = as_double(require(*it, "from", "sweep"), "sweep.from");
    s.to = as_double(require(*it, "to", "sweep"), "sweep.to");
    const auto& steps = require(*it, "steps", "sweep");
    if (!steps.is_number_integer() || steps.get<int>() < 2)
      throw ConfigError("sweep.steps must be an integer >= 2");
    s.steps = steps.get<int>();
    cfg.sweep = s;
  }

  if (auto it = root.find("fig1"); it != root.end()) {
    require_keys(*it, "fig1", {"tr_gg"});
    const auto& arr = require(*it, "tr_gg", "fig1");
    if (!arr.is_array() || arr.empty())
      throw ConfigError("fig1.tr_gg must be a non-empty array");
    cfg.fig1_tr_gg.clear();
    for (const auto& v : arr) {
      const double x = as_double(v, "fig1.tr_gg entry");
      if (x < 0 || x > 1)
        throw ConfigError("fig1.tr_gg entries must lie in [0, 1]");
      cfg.fig1_tr_gg.push_back(x);
    }
  }

  if (auto it = root.find("sample"); it != root.end()) {
    require_keys(*it, "sample", {"n_atoms"});
    const auto& n = require(*it, "n_atoms", "sample");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 1)
      throw ConfigError("sample.n_atoms must be a positive integer");
    cfg.n_atoms = n.get<std::int64_t>();
  }

  if (auto it = root.find("rng_seed"); it != root.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      throw ConfigError("rng_seed must be an integer");
    cfg.rng_seed = it->get<std::uint64_t>();
  }

  if (auto it = root.find("output"); it != root.end())
    cfg.output = it->get<std::string>();

  return cfg;
}

} // namespace iondet::harness
