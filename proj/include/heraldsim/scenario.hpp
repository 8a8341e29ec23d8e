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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "heraldsim/circuit.hpp"
#include "heraldsim/coinc.hpp"
#include "heraldsim/detect.hpp"
#include "heraldsim/fock.hpp"
#include "heraldsim/herald.hpp"
#include "heraldsim/source.hpp"
#include "json.hpp"

namespace heraldsim {

struct SweepSpec {
  std::string parameter = "phi";
  std::vector<double> grid;
};

/// Synthetic two-channel pulse streams, one per delay.
struct SyntheticPulses {
  std::vector<double> delays;
  std::size_t pairs = 10000;
  double spacing = 1000.0;  ///< ns
};

/// Declarative description of one run. Referenced files are read during
/// parsing, so a parsed config is self-contained.
struct ScenarioConfig {
  std::string name;
  ChipParams chip;
  /// Replaces the chip when set.
  std::optional<Interferometer> circuit;
  /// Explicit mode transformation; replaces chip and circuit when set.
  std::optional<Matrix> matrix;
  std::optional<FockState> state;
  std::optional<SpdcParams> spdc;
  HeraldPattern herald;
  DetectionTopology topology;
  std::optional<Occupation> exact_pattern;
  std::optional<ClickPattern> click_pattern;
  std::optional<SweepSpec> sweep;
  bool sagnac = false;
  int target_sector = 3;
  std::uint64_t seed = 1;
  /// Monte Carlo shots for simulate; 0 disables sampling.
  std::size_t shots = 0;
  CoincidenceConfig coincidence;
  std::vector<PulseEvent> pulses;
  std::optional<SyntheticPulses> synthetic;
  Distribution dist_a;
  Distribution dist_b;

  /// Throws ConfigError when inconsistent.
  void validate() const;
  /// Input state on the circuit's modes.
  FockState input_state() const;
  std::size_t mode_count() const;
};

/// `base` resolves relative file references.
ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(const std::string& name);

/// CSV with header "outcome,probability"; outcomes like "2:0".
Distribution read_distribution_csv(std::istream& in);
void write_distribution_csv(std::ostream& out, const Distribution& dist);

enum class OutputFormat { csv, json };

struct RunOptions {
  /// Output directory; nothing is written when empty.
  std::filesystem::path out_dir;
  OutputFormat format = OutputFormat::csv;
};

/// Each command returns its report and writes its tables under out_dir.
nlohmann::json cmd_simulate(const ScenarioConfig& config, const RunOptions& options);
nlohmann::json cmd_fringe(const ScenarioConfig& config, const RunOptions& options);
nlohmann::json cmd_contamination(const ScenarioConfig& config, const RunOptions& options);
nlohmann::json cmd_coincidence(const ScenarioConfig& config, const RunOptions& options);
nlohmann::json cmd_fidelity(const ScenarioConfig& config, const RunOptions& options);

/// Fixed-precision number formatting used by every writer.
std::string format_double(double v);

}  // namespace heraldsim
