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

#include <map>
#include <span>
#include <vector>

#include "heraldsim/circuit.hpp"
#include "heraldsim/detect.hpp"
#include "heraldsim/fock.hpp"
#include "heraldsim/herald.hpp"
#include "json.hpp"

namespace heraldsim {

/// Truncated two-mode down-conversion source.
struct SpdcParams {
  double xi = 0.085;
  int n_max = 4;
  /// Photon indistinguishability between the two arms, in [0, 1].
  double overlap = 1.0;

  void validate() const;
};

/// sum_{n<=n_max} xi^n |n,n> / sqrt(sum xi^{2n}) on two modes.
FockState spdc_state(const SpdcParams& params);

/// Probability of each |n,n> sector, n = 0..n_max.
std::vector<double> spdc_sector_weights(const SpdcParams& params);

/// Source state injected into chip ports b and c, vacuum on a and d.
FockState chip_spdc_input(const SpdcParams& params);

/// Output distribution when the photons of each group are mutually
/// indistinguishable but distinguishable from other groups' photons.
Distribution distinguishable_output_distribution(const Matrix& u, const std::vector<Occupation>& groups);

/// overlap * (fully interfering) + (1 - overlap) * (groups distinguishable).
Distribution partially_distinguishable_distribution(const Matrix& u, const std::vector<Occupation>& groups,
                                                    double overlap);

struct HomDip {
  double p_indistinguishable = 0.0;
  double p_distinguishable = 0.0;
  double p_observed = 0.0;
  double visibility = 0.0;
};

/// Two-and-two coincidence of |n,n> on one coupler; n is 2 for the usual
/// generalized HOM test. V = (P_dist - P_observed) / P_dist.
HomDip hom_dip(double overlap, double eta, int n = 2);

/// Heralded photon statistics of |n>_b|n>_c on the remaining modes when the
/// two arms have partial overlap.
struct PartialHerald {
  double probability = 0.0;
  Distribution conditional;
};
PartialHerald heralded_distribution_with_overlap(const ChipParams& chip, int n, const HeraldPattern& pattern,
                                                 double overlap);

/// |h_i> (c_first |N,M> + c_second |M,N>) |h_l> component of a chip output.
struct Branch {
  Occupation herald;  ///< counts on the herald modes
  int n = 0;
  int m = 0;
  cplx first;   ///< amplitude of |N,M> on the remaining modes
  cplx second;  ///< amplitude of |M,N>; equals `first` when N == M
  double magnitude = 0.0;
  /// Relative phase alpha in |N::M>^alpha when both kets are present.
  double alpha = 0.0;
};

/// Threshold-detection events that look like a target event: every herald
/// detector fires as required and the remaining trees register the target
/// photon number in total.
struct LabelEvents {
  double event_probability = 0.0;
  /// Part of event_probability whose true occupation differs from the label.
  double false_probability = 0.0;
};

struct SectorReport {
  int sector = 0;
  double weight = 0.0;
  /// Exact-projection herald probability given this sector.
  double herald_probability = 0.0;
  Distribution conditional_distribution;
  double event_probability = 0.0;
  double false_event_probability = 0.0;
  /// Keyed by apparent counts on the remaining modes.
  std::map<Occupation, LabelEvents> by_label;
  std::vector<Branch> branches;
  bool mislabeled = false;
};

struct ContaminationReport {
  ChipParams chip;
  SpdcParams params;
  int target_sector = 3;
  std::vector<SectorReport> sectors;
  /// sum_n weight_n * herald_probability_n
  double total_herald_probability = 0.0;
  /// sum_n weight_n * event_probability_n
  double total_event_probability = 0.0;
  double total_false_event_probability = 0.0;
  bool empty() const { return total_event_probability == 0.0 && total_herald_probability == 0.0; }
};

/// Sector-by-sector herald and false-event analysis of a truncated source
/// on the chip. Throws std::invalid_argument when n_max < target_sector.
ContaminationReport contamination_report(const ChipParams& chip, const SpdcParams& params,
                                         const HeraldPattern& pattern, const DetectionTopology& topology,
                                         int target_sector = 3);

/// Groups a state's terms by the counts on `herald_modes` into |N::M>
/// branches on the two remaining modes; keeps branches above `min_magnitude`.
std::vector<Branch> branch_decomposition(const FockState& output, std::span<const std::size_t> herald_modes,
                                         double min_magnitude = 1e-12);

nlohmann::json to_json(const ContaminationReport& report);

}  // namespace heraldsim
