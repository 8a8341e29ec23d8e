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

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "heraldsim/circuit.hpp"
#include "heraldsim/fock.hpp"
#include "json.hpp"

namespace heraldsim {

/// Exact photon counts required on a subset of modes.
struct HeraldPattern {
  std::map<std::size_t, int> requirements;

  bool matches(const Occupation& occ) const;
  int photons() const;
};

/// Outcome of a projective herald.
struct HeraldResult {
  double probability = 0.0;
  double raw_amplitude_norm = 0.0;
  /// Normalized state on the non-herald modes; empty when `heralded` is false.
  FockState conditional_state;
  /// Original indices of the modes kept in `conditional_state`, ascending.
  std::vector<std::size_t> remaining_modes;
  /// False when the pattern has zero probability.
  bool heralded = false;
};

/// Keeps the terms matching `pattern`, strips the herald modes and renormalizes.
HeraldResult project(const FockState& state, const HeraldPattern& pattern);

/// The unnormalized kept component, with herald modes still present.
FockState project_unnormalized(const FockState& state, const HeraldPattern& pattern);

/// compile -> apply -> project on the heralding chip.
HeraldResult heralded_output(const ChipParams& chip, const FockState& input, const HeraldPattern& pattern);

struct HeraldScanPoint {
  double phi = 0.0;
  HeraldResult result;
};

/// heralded_output at every phase in `phi_grid` (overriding chip.phi), in grid order.
std::vector<HeraldScanPoint> herald_scan(const ChipParams& chip, const FockState& input,
                                         const HeraldPattern& pattern, std::span<const double> phi_grid,
                                         std::size_t workers = 0);

/// The chip's standard herald: one photon in each of i and l.
HeraldPattern chip_herald();

/// |n>_b |n>_c on the four chip modes.
FockState chip_pair_input(int n);

/// {"phi": ..., "prob": ..., "heralded": ..., "state": {...}}
nlohmann::json to_json(double phi, const HeraldResult& result);

}  // namespace heraldsim
