/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iondet/detect_false.hpp"
#include "iondet/detect_ineff.hpp"
#include "iondet/harness/config.hpp"
#include "iondet/harness/output.hpp"
#include "iondet/joint_sim.hpp"
#include "iondet/metrics.hpp"
#include "iondet/rng.hpp"
#include "iondet/version.hpp"

namespace iondet::harness {

struct ScanResult {
  Metadata metadata;
  Table table;
};

struct ChainReport {
  Metadata metadata;
  nlohmann::ordered_json report;
  Table summary;
};

namespace detail {

inline std::string grid_string(const ContinuumGrid& grid) {
  return "n_modes=" + std::to_string(grid.n_modes) +
         ";e_min=" + format_double(grid.e_min) +
         ";e_max=" + format_double(grid.e_max);
}

inline Metadata common_metadata(const std::string& tool) {
  Metadata meta;
  meta.add("schema_version", std::int64_t{kSchemaVersion});
  meta.add("tool", tool);
  meta.add("version", version());
  meta.add("build", build_describe());
  return meta;
}

inline const GridConfig& require_grid(const ScenarioConfig& cfg,
                                      const std::string& tool) {
  if (!cfg.grid)
    throw ConfigError(tool + " requires a grid section");
  return *cfg.grid;
}

inline const DetectorConfig& require_detector(
    const std::optional<DetectorConfig>& d, const std::string& name,
    const std::string& tool) {
  if (!d)
    throw ConfigError(tool + " requires a " + name + " section");
  return *d;
}

} // namespace detail

/// Survival of the first-zone target level versus the golden-rule
/// exponential, swept over the interaction time.
inline ScanResult run_decay_scan(const ScenarioConfig& cfg) {
  if (cfg.model != ModelKind::Inefficient)
    throw ConfigError("decay scan applies to the inefficient model");
  const DetectorConfig& dc =
      detail::require_detector(cfg.detector_de, "detector_de", "decay scan");
  if (dc.coupling_g != 0.0)
    throw ConfigError("decay scan requires detector_de.coupling_g = 0");

  // Default grid: resonant with the decaying level and bandwidth 400 Gamma,
  // wide enough for the decay to stay exponential at the percent level.
  // The rate depends on the spacing, so the bandwidth solves
  // bw = 400 * 2 pi v^2 (n-1) / bw.
  ContinuumGrid grid = ContinuumGrid::centered(3, 0.0, 1.0);
  if (cfg.grid) {
    grid = cfg.grid->to_grid();
  } else {
    const int n = 1001;
    const double bw = std::max(
        std::sqrt(400.0 * 2.0 * std::numbers::pi * dc.coupling_e *
                  dc.coupling_e * (n - 1)),
        1.0);
    grid = ContinuumGrid::centered(n, dc.eps_e, bw);
  }
  const double gamma = golden_rule_rate(grid, dc.coupling_e);

  SweepConfig sweep = cfg.sweep.value_or(
      SweepConfig{"time", 0.0, gamma > 0.0 ? 3.0 / gamma : 1.0, 61});
  if (sweep.parameter != "time")
    throw ConfigError("decay scan sweeps the parameter 'time'");

  const DetectorSpec spec = dc.to_spec(Zone::De);
  const EigenSystem eig = diagonalize(build_hamiltonian(grid, spec));

  Metadata meta = detail::common_metadata("iondet decay");
  meta.add("model", to_string(cfg.model));
  meta.add("grid", detail::grid_string(grid));
  meta.add("coupling", dc.coupling_e);
  meta.add("golden_rule_rate", gamma);
  meta.add("recurrence_time", grid.recurrence_time());

  Table table;
  table.columns = {"t", "survival_numeric", "survival_analytic",
                   "relative_error"};
  for (const double t : sweep.values()) {
    const double numeric = std::norm(survival_amplitude(eig, kIndexE, t));
    const double analytic = std::exp(-gamma * std::abs(t));
    table.add_row(
        {t, numeric, analytic, std::abs(numeric - analytic) / analytic});
  }
  return {std::move(meta), std::move(table)};
}

/// Normalized second-zone click probability against the first-zone
/// efficiency, one curve per configured ground-state population.
inline ScanResult run_fig1_scan(const ScenarioConfig& cfg) {
  if (cfg.model != ModelKind::Inefficient)
    throw ConfigError("fig1 scan applies to the inefficient model");
  SweepConfig sweep = cfg.sweep.value_or(SweepConfig{"p_e", 0.0, 1.0, 101});
  if (sweep.parameter != "p_e")
    throw ConfigError("fig1 scan sweeps the parameter 'p_e'");
  if (sweep.from < 0.0 || sweep.to > 1.0)
    throw ConfigError("fig1 scan requires p_e within [0, 1]");

  Metadata meta = detail::common_metadata("iondet fig1");
  meta.add("model", to_string(cfg.model));

  Table table;
  table.columns = {"tr_gg", "p_e", "ratio"};
  for (const double tr_gg : cfg.fig1_tr_gg) {
    CMatrix ee(1, 1), eg = CMatrix::Zero(1, 1), gg(1, 1);
    ee(0, 0) = 1.0 - tr_gg;
    gg(0, 0) = tr_gg;
    const AtomCavityState state = AtomCavityState::make(ee, eg, gg);
    for (const double p_e : sweep.values()) {
      // with p_g = 1 the click probability in D_g equals the normalized
      // ratio p_click / p_g itself
      const double ratio = click_probability_dg(
          state, Efficiency::from_value(p_e), Efficiency::from_value(1.0));
      table.add_row({tr_gg, p_e, ratio});
    }
  }
  return {std::move(meta), std::move(table)};
}

namespace detail {

inline nlohmann::ordered_json outcome_json(const ChainOutcome& closed,
                                           const ChainOutcome* reference) {
  nlohmann::ordered_json j;
  j["record"] = to_string(closed.record);
  j["probability"] = closed.probability;
  if (closed.cavity_state.size() > 0)
    j["cavity_state"] = matrix_json(closed.cavity_state);
  if (reference) {
    j["probability_reference"] = reference->probability;
    j["probability_delta"] =
        std::abs(closed.probability - reference->probability);
    if (reference->cavity_state.size() > 0)
      j["cavity_state_reference"] = matrix_json(reference->cavity_state);
    if (closed.cavity_state.size() > 0 && reference->cavity_state.size() > 0)
      j["cavity_state_max_abs_delta"] =
          (closed.cavity_state - reference->cavity_state)
              .cwiseAbs()
              .maxCoeff();
  }
  return j;
}

struct ChainSetup {
  ChainDistribution closed;
  std::optional<ChainDistribution> reference;
  std::optional<EfficiencyPair> realized;  // inefficient model
  std::optional<std::pair<double, double>> cross_weights; // false model
  std::string mode;
};

/// Runs the configured chain along the closed-form route and, in dynamical
/// mode, along the joint-simulation reference route.
inline ChainSetup run_configured_chain(const ScenarioConfig& cfg) {
  if (!cfg.state)
    throw ConfigError("chain scenarios require a state section");
  const AtomCavityState state = cfg.state->to_state();

  ChainSetup setup;
  const bool dynamical = cfg.grid && cfg.detector_de && cfg.detector_dg;

  if (cfg.model == ModelKind::Inefficient) {
    if (dynamical) {
      const ContinuumGrid grid = cfg.grid->to_grid();
      const DetectorSpec de = cfg.detector_de->to_spec(Zone::De);
      const DetectorSpec dg = cfg.detector_dg->to_spec(Zone::Dg);
      const Efficiency p_e = efficiency_numeric(grid, de);
      const Efficiency p_g = efficiency_numeric(grid, dg);
      setup.closed = run_chain(state, p_e, p_g);
      setup.reference = simulate_chain(state, grid, de, dg);
      setup.realized = EfficiencyPair{p_e.value(), p_g.value()};
      setup.mode = "dynamical";
    } else {
      if (!cfg.efficiencies)
        throw ConfigError(
            "inefficient chain needs either grid + detectors or efficiencies");
      setup.closed = run_chain(state,
                               Efficiency::from_value(cfg.efficiencies->p_e),
                               Efficiency::from_value(cfg.efficiencies->p_g));
      setup.realized = cfg.efficiencies;
      setup.mode = "phenomenological";
    }
    return setup;
  }

  if (!dynamical)
    throw ConfigError("false_count chains require grid and both detectors");
  const ContinuumGrid grid = cfg.grid->to_grid();
  const DetectorSpec de = cfg.detector_de->to_spec(Zone::De);
  const DetectorSpec dg = cfg.detector_dg->to_spec(Zone::Dg);
  const QCoefficientTable table_de = q_table(grid, de);
  const QCoefficientTable table_dg = q_table(grid, dg);
  setup.closed = chain_false(state, table_de, table_dg);
  setup.reference = simulate_chain(state, grid, de, dg);
  setup.cross_weights = {table_de.cross_transition_weight(),
                         table_dg.cross_transition_weight()};
  setup.mode = "dynamical";
  return setup;
}

} // namespace detail

/// Runs the configured chain and reports outcome probabilities, conditional
/// cavity states and, in dynamical mode, the deltas against the
/// joint-simulation reference.
inline ChainReport run_chain_scenario(const ScenarioConfig& cfg) {
  detail::ChainSetup setup = detail::run_configured_chain(cfg);

  Metadata meta = detail::common_metadata("iondet chain");
  meta.add("model", to_string(cfg.model));
  meta.add("mode", setup.mode);
  if (cfg.grid)
    meta.add("grid", detail::grid_string(cfg.grid->to_grid()));

  nlohmann::ordered_json report;
  report["metadata"] = metadata_json(meta);
  if (setup.realized) {
    report["efficiencies"] = {{"p_e", setup.realized->p_e},
                              {"p_g", setup.realized->p_g}};
  }
  if (setup.cross_weights) {
    report["diagnostics"] = {
        {"cross_transition_weight_de", setup.cross_weights->first},
        {"cross_transition_weight_dg", setup.cross_weights->second}};
  }

  const auto closed_outcomes = setup.closed.outcomes();
  const std::array<const ChainOutcome*, 3> reference_outcomes =
      setup.reference ? setup.reference->outcomes()
                      : std::array<const ChainOutcome*, 3>{nullptr, nullptr,
                                                           nullptr};

  Table summary;
  summary.columns = {"outcome", "probability"};
  if (setup.reference) {
    summary.columns.push_back("probability_reference");
    summary.columns.push_back("probability_delta");
    summary.columns.push_back("cavity_state_max_abs_delta");
  }

  auto outcomes = nlohmann::ordered_json::array();
  double max_p_delta = 0.0, max_state_delta = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ChainOutcome& closed = *closed_outcomes[i];
    const ChainOutcome* ref = reference_outcomes[i];
    outcomes.push_back(detail::outcome_json(closed, ref));

    std::vector<Cell> row{to_string(closed.record), closed.probability};
    if (ref) {
      const double pd = std::abs(closed.probability - ref->probability);
      double sd = 0.0;
      if (closed.cavity_state.size() > 0 && ref->cavity_state.size() > 0)
        sd = (closed.cavity_state - ref->cavity_state).cwiseAbs().maxCoeff();
      max_p_delta = std::max(max_p_delta, pd);
      max_state_delta = std::max(max_state_delta, sd);
      row.push_back(ref->probability);
      row.push_back(pd);
      row.push_back(sd);
    }
    summary.add_row(std::move(row));
  }
  report["outcomes"] = std::move(outcomes);
  if (setup.reference) {
    report["summary"] = {{"max_probability_delta", max_p_delta},
                         {"max_cavity_state_delta", max_state_delta}};
  }
  return {std::move(meta), std::move(report), std::move(summary)};
}

/// First- and second-zone fidelities of the false-count model against the
/// ideal-detector reference, swept over one zone parameter.
inline ScanResult run_fidelity_scan(const ScenarioConfig& cfg) {
  if (cfg.model != ModelKind::FalseCount)
    throw ConfigError("fidelity scan applies to the false_count model");
  const GridConfig& gc = detail::require_grid(cfg, "fidelity scan");
  DetectorConfig de =
      detail::require_detector(cfg.detector_de, "detector_de", "fidelity scan");
  DetectorConfig dg =
      detail::require_detector(cfg.detector_dg, "detector_dg", "fidelity scan");
  if (!cfg.sweep)
    throw ConfigError("fidelity scan requires a sweep section");
  const SweepConfig& sweep = *cfg.sweep;

  const ContinuumGrid grid = gc.to_grid();
  const AtomCavityState probe = entangled_pair_state(2);
  CMatrix ideal_first = CMatrix::Zero(2, 2);
  ideal_first(0, 0) = 1.0;

  Metadata meta = detail::common_metadata("iondet fidelity");
  meta.add("model", to_string(cfg.model));
  meta.add("grid", detail::grid_string(grid));
  meta.add("parameter", sweep.parameter);

  Table table;
  table.columns = {"value",      "f1_closed", "f1_general", "f1_delta",
                   "f2_closed",  "f2_general", "f2_delta",  "cross_weight_de"};
  for (const double value : sweep.values()) {
    DetectorConfig de_point = de;
    DetectorConfig dg_point = dg;
    if (sweep.parameter == "de.coupling_g")
      de_point.coupling_g = value;
    else if (sweep.parameter == "dg.coupling_e")
      dg_point.coupling_e = value;
    else if (sweep.parameter == "time") {
      de_point.time = value;
      dg_point.time = value;
    } else
      throw ConfigError(
          "fidelity scan sweeps 'de.coupling_g', 'dg.coupling_e' or 'time'");

    const QCoefficientTable table_de =
        q_table(grid, de_point.to_spec(Zone::De));
    const QCoefficientTable table_dg =
        q_table(grid, dg_point.to_spec(Zone::Dg));

    const double f1_closed = fidelity_first_zone(table_de);
    const double f1_general =
        fidelity(ideal_first, post_click_state_false(probe, table_de));
    const double f2_general =
        fidelity_second_zone_general(table_de, table_dg);
    double f2_closed = std::numeric_limits<double>::quiet_NaN();
    double f2_delta = std::numeric_limits<double>::quiet_NaN();
    try {
      f2_closed = fidelity_second_zone(table_de, table_dg);
      f2_delta = std::abs(f2_closed - f2_general);
    } catch (const AssumptionViolated&) {
      // reported as NaN alongside the measured cross weight
    }
    table.add_row({value, f1_closed, f1_general,
                   std::abs(f1_closed - f1_general), f2_closed, f2_general,
                   f2_delta, table_de.cross_transition_weight()});
  }
  return {std::move(meta), std::move(table)};
}

/// Counts of independently sampled click records.
struct RecordEnsemble {
  std::int64_t n_atoms = 0;
  std::uint64_t seed = 0;
  std::array<std::int64_t, 3> counts{};        // click_de, click_dg, double_nonclick
  std::array<double, 3> probabilities{};       // analytic distribution
  std::array<double, 3> frequencies() const {
    std::array<double, 3> f{};
    for (int i = 0; i < 3; ++i)
      f[i] = static_cast<double>(counts[i]) / static_cast<double>(n_atoms);
    return f;
  }
};

/// Draws i.i.d. click records from the configured chain distribution.
inline RecordEnsemble sample_records(const ScenarioConfig& cfg) {
  if (!cfg.n_atoms)
    throw ConfigError("sampling requires a sample.n_atoms entry");
  const detail::ChainSetup setup = detail::run_configured_chain(cfg);
  const std::array<double, 3> p = setup.closed.probabilities();

  RecordEnsemble ensemble;
  ensemble.n_atoms = *cfg.n_atoms;
  ensemble.seed = cfg.rng_seed;
  ensemble.probabilities = p;

  SplitMix64 rng(cfg.rng_seed);
  const double c0 = p[0];
  const double c1 = p[0] + p[1];
  for (std::int64_t i = 0; i < ensemble.n_atoms; ++i) {
    const double u = rng.next_double();
    if (u < c0)
      ++ensemble.counts[0];
    else if (u < c1)
      ++ensemble.counts[1];
    else
      ++ensemble.counts[2];
  }
  return ensemble;
}

inline ScanResult ensemble_result(const RecordEnsemble& ensemble,
                                  const ScenarioConfig& cfg) {
  Metadata meta = detail::common_metadata("iondet sample");
  meta.add("model", to_string(cfg.model));
  meta.add("seed", std::uint64_t{ensemble.seed});
  meta.add("n_atoms", std::int64_t{ensemble.n_atoms});

  static constexpr std::array<const char*, 3> names{"click_de", "click_dg",
                                                    "double_nonclick"};
  Table table;
  table.columns = {"outcome", "count", "frequency", "probability"};
  const auto freq = ensemble.frequencies();
  for (int i = 0; i < 3; ++i)
    table.add_row({std::string(names[i]), ensemble.counts[i], freq[i],
                   ensemble.probabilities[i]});
  return {std::move(meta), std::move(table)};
}

/// Builds every section of the configuration and summarizes it, throwing
/// ConfigError (or a module error) when something is inconsistent.
inline std::string validate_config(const ScenarioConfig& cfg) {
  std::string summary = "model: " + to_string(cfg.model) + "\n";
  if (cfg.grid) {
    const ContinuumGrid grid = cfg.grid->to_grid();
    summary += "grid: " + detail::grid_string(grid) +
               " (spacing " + format_double(grid.spacing()) + ")\n";
  }
  if (cfg.detector_de) {
    const DetectorSpec de = cfg.detector_de->to_spec(Zone::De);
    summary += "detector_de: couplings (" + format_double(de.coupling_e) +
               ", " + format_double(de.coupling_g) + "), time " +
               format_double(de.interaction_time) + "\n";
  }
  if (cfg.detector_dg) {
    const DetectorSpec dg = cfg.detector_dg->to_spec(Zone::Dg);
    summary += "detector_dg: couplings (" + format_double(dg.coupling_e) +
               ", " + format_double(dg.coupling_g) + "), time " +
               format_double(dg.interaction_time) + "\n";
  }
  if (cfg.state) {
    const AtomCavityState state = cfg.state->to_state();
    summary += "state: dim " + std::to_string(state.dim()) + ", trace " +
               format_double(state.trace()) + "\n";
  }
  if (cfg.sweep)
    summary += "sweep: " + cfg.sweep->parameter + " from " +
               format_double(cfg.sweep->from) + " to " +
               format_double(cfg.sweep->to) + " in " +
               std::to_string(cfg.sweep->steps) + " steps\n";
  if (cfg.n_atoms)
    summary += "sample: " + std::to_string(*cfg.n_atoms) + " atoms, seed " +
               std::to_string(cfg.rng_seed) + "\n";
  return summary;
}

} // namespace iondet::harness
