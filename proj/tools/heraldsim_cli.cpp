/*
 * Copyright 2026 The heraldsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/scenario.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct Options {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::string pulses;
  std::string dist_a;
  std::string dist_b;
};

heraldsim::ScenarioConfig build_config(const Options& o) {
  if (!o.config.empty() && !o.preset.empty()) throw heraldsim::ConfigError("give --config or --preset, not both");
  heraldsim::ScenarioConfig c;
  if (!o.config.empty()) c = heraldsim::load_scenario(o.config);
  if (!o.preset.empty()) c = heraldsim::preset(o.preset);
  if (o.seed) c.seed = *o.seed;
  if (!o.pulses.empty()) {
    std::ifstream in(o.pulses);
    if (!in) throw heraldsim::ConfigError("cannot open " + o.pulses);
    c.pulses = heraldsim::read_pulse_csv(in);
  }
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw heraldsim::ConfigError("cannot open " + path);
    return heraldsim::read_distribution_csv(in);
  };
  if (!o.dist_a.empty()) c.dist_a = load(o.dist_a);
  if (!o.dist_b.empty()) c.dist_b = load(o.dist_b);
  return c;
}

/// Report without the bulky tables, for the terminal.
nlohmann::json summary(nlohmann::json report) {
  for (const char* key : {"samples", "input", "output", "sectors", "profile"}) report.erase(key);
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded multi-photon chip simulator"};
  app.require_subcommand(1);
  Options o;
  bool list = false;
  app.add_flag("--list-presets", list, "Print the preset names and exit");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Scenario JSON file")->check(CLI::ExistingFile);
    sub->add_option("--preset", o.preset, "Named scenario preset");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* simulate = app.add_subcommand("simulate", "Evolve, herald and report photon statistics");
  auto* fringe = app.add_subcommand("fringe", "Scan the chip phase and estimate the fringe period");
  auto* contamination = app.add_subcommand("contamination", "Higher-order source contamination report");
  auto* coincidence = app.add_subcommand("coincidence", "Count coincidences in pulse streams");
  auto* fid = app.add_subcommand("fidelity", "Fidelity between two distributions");
  for (auto* sub : {simulate, fringe, contamination, coincidence, fid}) common(sub);
  coincidence->add_option("pulses", o.pulses, "Pulse CSV (channel,t_ns)");
  fid->add_option("a", o.dist_a, "Distribution CSV (outcome,probability)");
  fid->add_option("b", o.dist_b, "Distribution CSV (outcome,probability)");

  if (argc > 1 && std::string(argv[1]) == "--list-presets") {
    for (const auto& name : heraldsim::preset_names()) std::cout << name << '\n';
    return 0;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    const heraldsim::ScenarioConfig config = build_config(o);
    heraldsim::RunOptions run;
    run.out_dir = o.out;
    run.format = o.format == "json" ? heraldsim::OutputFormat::json : heraldsim::OutputFormat::csv;
    nlohmann::json report;
    if (simulate->parsed()) report = heraldsim::cmd_simulate(config, run);
    if (fringe->parsed()) report = heraldsim::cmd_fringe(config, run);
    if (contamination->parsed()) report = heraldsim::cmd_contamination(config, run);
    if (coincidence->parsed()) report = heraldsim::cmd_coincidence(config, run);
    if (fid->parsed()) report = heraldsim::cmd_fidelity(config, run);
    std::cout << summary(report).dump(2) << '\n';
  } catch (const heraldsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const heraldsim::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
