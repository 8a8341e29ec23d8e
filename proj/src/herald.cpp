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

#include "heraldsim/herald.hpp"

#include <cmath>
#include <stdexcept>

#include "heraldsim/evolve.hpp"
#include "heraldsim/rng.hpp"

namespace heraldsim {

bool HeraldPattern::matches(const Occupation& occ) const {
  for (const auto& [mode, count] : requirements) {
    if (occ[mode] != count) return false;
  }
  return true;
}

int HeraldPattern::photons() const {
  int n = 0;
  for (const auto& [mode, count] : requirements) n += count;
  return n;
}

namespace {

void check_pattern(const FockState& state, const HeraldPattern& pattern) {
  for (const auto& [mode, count] : pattern.requirements) {
    if (mode >= state.modes()) throw std::out_of_range("herald mode out of range");
    if (count < 0) throw std::invalid_argument("herald counts must be non-negative");
  }
}

}  // namespace

FockState project_unnormalized(const FockState& state, const HeraldPattern& pattern) {
  check_pattern(state, pattern);
  FockState::Terms kept;
  for (const auto& [occ, amp] : state.terms()) {
    if (pattern.matches(occ)) kept.emplace(occ, amp);
  }
  return FockState(state.modes(), std::move(kept));
}

HeraldResult project(const FockState& state, const HeraldPattern& pattern) {
  const FockState kept = project_unnormalized(state, pattern);
  HeraldResult r;
  for (std::size_t m = 0; m < state.modes(); ++m) {
    if (!pattern.requirements.contains(m)) r.remaining_modes.push_back(m);
  }
  r.raw_amplitude_norm = kept.norm();
  r.probability = r.raw_amplitude_norm * r.raw_amplitude_norm;
  r.heralded = r.probability > 0.0;
  if (!r.heralded) {
    r.conditional_state = FockState(r.remaining_modes.size(), {});
    return r;
  }
  FockState::Terms reduced;
  for (const auto& [occ, amp] : kept.terms()) reduced[occ.select(r.remaining_modes)] += amp;
  r.conditional_state = FockState(r.remaining_modes.size(), std::move(reduced)).scaled(1.0 / r.raw_amplitude_norm);
  return r;
}

HeraldResult heralded_output(const ChipParams& chip, const FockState& input, const HeraldPattern& pattern) {
  if (input.modes() != 4) throw std::invalid_argument("chip input must live on the four chip modes");
  return project(evolve(compile(chip_circuit(chip)), input), pattern);
}

std::vector<HeraldScanPoint> herald_scan(const ChipParams& chip, const FockState& input,
                                         const HeraldPattern& pattern, std::span<const double> phi_grid,
                                         std::size_t workers) {
  if (phi_grid.empty()) throw std::invalid_argument("phase grid is empty");
  std::vector<HeraldScanPoint> out(phi_grid.size());
  parallel_for(phi_grid.size(), workers, [&](std::size_t idx) {
    ChipParams p = chip;
    p.phi = phi_grid[idx];
    out[idx] = {p.phi, heralded_output(p, input, pattern)};
  });
  return out;
}

HeraldPattern chip_herald() { return {{{chip_mode::i, 1}, {chip_mode::l, 1}}}; }

FockState chip_pair_input(int n) { return FockState::basis(Occupation{0, n, n, 0}); }

nlohmann::json to_json(double phi, const HeraldResult& result) {
  return {{"phi", phi},
          {"prob", result.probability},
          {"heralded", result.heralded},
          {"remaining_modes", result.remaining_modes},
          {"state", to_json(result.conditional_state)}};
}

}  // namespace heraldsim
