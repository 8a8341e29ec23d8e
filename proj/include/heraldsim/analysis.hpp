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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heraldsim/circuit.hpp"
#include "heraldsim/detect.hpp"
#include "heraldsim/fock.hpp"

namespace heraldsim {

/// What counts as a detection event in a fringe scan: either an exact photon
/// count on every chip output, or a threshold click pattern on a topology.
struct FringeScenario {
  ChipParams chip;
  FockState input;
  std::optional<Occupation> exact;
  std::optional<ClickPattern> clicks;
  DetectionTopology topology;

  void validate() const;
  std::string pattern_label() const;
};

struct FringeSample {
  double phi = 0.0;
  double probability = 0.0;
  std::string pattern;
};

/// Probability of the scenario's detection event at each phase of `phi_grid`
/// (the chip's own phi is overridden). Needs at least 4 grid points.
std::vector<FringeSample> fringe_scan(const FringeScenario& scenario, std::span<const double> phi_grid,
                                      std::size_t workers = 0);

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FringeFit {
  bool has_fringe = false;
  double period = 0.0;
  double angular_frequency = 0.0;
  /// (max - min) / (max + min) of the samples.
  double visibility = 0.0;
  /// Fraction of the sample variance explained by the fitted sinusoid.
  double explained = 0.0;
};

/// Dominant period from a least-squares sinusoid periodogram: scans angular
/// frequencies from pi/span up to the Nyquist limit of the mean spacing, then
/// refines the best one by golden-section search. Samples may be unsorted.
/// Throws InsufficientSamples below 8 samples.
FringeFit fringe_period(std::span<const FringeSample> samples);

struct PrecisionBounds {
  double sql = 0.0;
  double heisenberg = 0.0;
};
PrecisionBounds precision_bounds(int n_photons);

/// |N::M> (alpha = 0) probed by phase theta on its first mode followed by a
/// balanced coupler. Reports, for each theta, the probability of the output
/// with the largest variance over the grid.
std::vector<FringeSample> noon_fringe(int n, int m, std::span<const double> theta_grid);

/// Evenly spaced grid of `points` values on [start, stop).
std::vector<double> phase_grid(double start, double stop, std::size_t points);

struct SagnacResult {
  /// Forward herald probability of the chip.
  double herald_probability = 0.0;
  /// Heralded state on (j, k) after the forward pass.
  FockState forward_state;
  /// Distribution on (a, d) after the reverse pass, unconditioned.
  Distribution raw;
  /// Probability that every photon left through a or d.
  double extraction_probability = 0.0;
  /// `raw` restricted to full extraction and renormalized.
  Distribution conditioned;
};

/// Reverse pass for a state on (j, k): swap j and k, DC2, then DC3/DC4 towards a and d.
SagnacResult sagnac_reverse(const FockState& jk_state, const ChipParams& chip);
SagnacResult sagnac_reverse(const Ensemble& jk_ensemble, const ChipParams& chip);

/// Forward chip on |n,n> heralded on i and l, then the reverse pass.
SagnacResult sagnac_scenario(const ChipParams& chip, int n = 2);
/// As sagnac_scenario, with the heralded state fully dephased before the loop.
SagnacResult sagnac_scenario_dephased(const ChipParams& chip, int n = 2);

}  // namespace heraldsim
