/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "iondet/harness.hpp"
#include "iondet/iondet.hpp"

namespace {

using iondet::harness::ScenarioConfig;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOptions& opts,
                const std::string& default_format) {
  opts.format = default_format;
  sub->add_option("--config", opts.config_path, "Scenario configuration file")
      ->required();
  sub->add_option("--out", opts.out_path,
                  "Output path (defaults to the config's output, else stdout)");
  sub->add_option("--seed", opts.seed, "Override the configured RNG seed");
  sub->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

ScenarioConfig load(const CommonOptions& opts) {
  ScenarioConfig cfg = ScenarioConfig::load(opts.config_path);
  if (opts.seed)
    cfg.rng_seed = *opts.seed;
  return cfg;
}

void emit(const CommonOptions& opts, const ScenarioConfig& cfg,
          const std::string& content) {
  std::string path = opts.out_path;
  if (path.empty() && cfg.output)
    path = *cfg.output;
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw iondet::ConfigError("cannot open output file '" + path + "'");
  out << content;
}

std::string render(const iondet::harness::ScanResult& result,
                   const std::string& format) {
  if (format == "json") {
    std::ostringstream os;
    iondet::harness::write_json(
        os, iondet::harness::table_json(result.metadata, result.table));
    return os.str();
  }
  return iondet::harness::csv_string(result.metadata, result.table);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field-ionization detector models for cavity QED: click "
               "statistics, conditional cavity states and fidelities."};
  app.require_subcommand(1);

  CommonOptions decay_opts, fig1_opts, chain_opts, fidelity_opts, sample_opts;
  std::string validate_path;

  auto* decay = app.add_subcommand(
      "decay", "Survival of the excited level vs the golden-rule exponential");
  add_common(decay, decay_opts, "csv");

  auto* fig1 = app.add_subcommand(
      "fig1", "Normalized second-zone click probability vs first-zone "
              "efficiency");
  add_common(fig1, fig1_opts, "csv");

  auto* chain = app.add_subcommand(
      "chain", "Two-zone chain: outcome probabilities, conditional states "
               "and reference deltas");
  add_common(chain, chain_opts, "json");

  auto* fidelity = app.add_subcommand(
      "fidelity", "Zone fidelities against the ideal detector");
  add_common(fidelity, fidelity_opts, "csv");

  auto* sample = app.add_subcommand(
      "sample", "Seeded Monte Carlo sampling of click records");
  add_common(sample, sample_opts, "csv");

  auto* validate =
      app.add_subcommand("validate", "Check a configuration file");
  validate->add_option("--config", validate_path, "Scenario configuration file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (decay->parsed()) {
      const ScenarioConfig cfg = load(decay_opts);
      emit(decay_opts, cfg,
           render(iondet::harness::run_decay_scan(cfg), decay_opts.format));
    } else if (fig1->parsed()) {
      const ScenarioConfig cfg = load(fig1_opts);
      emit(fig1_opts, cfg,
           render(iondet::harness::run_fig1_scan(cfg), fig1_opts.format));
    } else if (chain->parsed()) {
      const ScenarioConfig cfg = load(chain_opts);
      const auto report = iondet::harness::run_chain_scenario(cfg);
      if (chain_opts.format == "csv") {
        emit(chain_opts, cfg,
             iondet::harness::csv_string(report.metadata, report.summary));
      } else {
        std::ostringstream os;
        iondet::harness::write_json(os, report.report);
        emit(chain_opts, cfg, os.str());
      }
    } else if (fidelity->parsed()) {
      const ScenarioConfig cfg = load(fidelity_opts);
      emit(fidelity_opts, cfg,
           render(iondet::harness::run_fidelity_scan(cfg),
                  fidelity_opts.format));
    } else if (sample->parsed()) {
      const ScenarioConfig cfg = load(sample_opts);
      const auto ensemble = iondet::harness::sample_records(cfg);
      emit(sample_opts, cfg,
           render(iondet::harness::ensemble_result(ensemble, cfg),
                  sample_opts.format));
    } else if (validate->parsed()) {
      const ScenarioConfig cfg = ScenarioConfig::load(validate_path);
      std::cout << iondet::harness::validate_config(cfg) << "config OK\n";
    }
  } catch (const iondet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
