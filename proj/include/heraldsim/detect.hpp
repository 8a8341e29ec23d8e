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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "heraldsim/circuit.hpp"
#include "heraldsim/fock.hpp"
#include "heraldsim/herald.hpp"
#include "json.hpp"

namespace heraldsim {

struct Leaf {
  std::string detector;
  double probability = 0.0;
};

/// Fan-out of one mode onto threshold detectors. Only the leaf routing
/// probabilities matter; the deficit 1 - sum(p) is loss.
struct SplitterTree {
  std::size_t mode = 0;
  std::vector<Leaf> leaves;

  void validate() const;
  double routed_probability() const;
};

struct DetectorModel {
  /// Per-detector efficiency; detectors not listed have efficiency 1.
  std::map<std::string, double> efficiency;
  bool number_resolving = false;
  /// Reserved for an additive dark-count model; must stay 0.
  double dark_count_probability = 0.0;

  double efficiency_of(const std::string& detector) const;
};

struct DetectionTopology {
  std::vector<SplitterTree> trees;
  DetectorModel detectors;

  /// Throws std::invalid_argument for overlapping trees, duplicate detectors
  /// or out-of-range parameters; `modes` bounds the tree modes when non-zero.
  void validate(std::size_t modes = 0) const;
  std::vector<std::string> detector_ids() const;
  const SplitterTree* tree_for(std::size_t mode) const;
};

/// Detectors that fired. Sorted, so usable as a map key.
using ClickPattern = std::set<std::string>;
using ClickDistribution = std::map<ClickPattern, double>;

/// "D1+D2"; the empty pattern is "-".
std::string to_string(const ClickPattern& pattern);
ClickPattern parse_click_pattern(const std::string& text);

/// Probability that `photons` photons routed independently through `tree`
/// land one each on the `targets` (|targets| == photons).
double cascade_resolve_probability(const SplitterTree& tree, int photons, const std::set<std::string>& targets);

/// Distribution of the set of fired detectors on one tree for `photons` photons.
ClickDistribution tree_click_distribution(const SplitterTree& tree, const DetectorModel& detectors, int photons);

/// Exact click distribution of `state` under threshold detection. Modes
/// without a tree are traced out. Sums to the squared norm of `state`.
ClickDistribution click_distribution(const FockState& state, const DetectionTopology& topology);
ClickDistribution click_distribution(const Ensemble& ensemble, const DetectionTopology& topology);

/// Probability that detector `detector` fires.
double single_click_probability(const FockState& state, const DetectionTopology& topology, const std::string& detector);

/// Monte Carlo click patterns: sample the photon numbers, route each photon.
std::vector<ClickPattern> sample_clicks(const FockState& state, const DetectionTopology& topology,
                                        std::size_t shots, std::uint64_t seed, std::size_t workers = 0);

ClickDistribution empirical_click_distribution(const std::vector<ClickPattern>& samples);

/// Number of fired detectors on the tree of each mode in `modes`.
Occupation clicks_per_mode(const ClickPattern& pattern, const DetectionTopology& topology,
                           std::span<const std::size_t> modes);

struct NormalizedRates {
  ClickDistribution distribution;
  /// Detectors with zero singles; patterns containing them are dropped.
  std::vector<std::string> flagged_detectors;
};

/// Divides each pattern count by the product of the relative efficiencies of
/// its detectors (singles over mean singles) and by the pattern's resolution
/// probability (default 1), then renormalizes.
NormalizedRates normalize_rates(const std::map<ClickPattern, double>& raw_counts,
                                const std::map<std::string, double>& singles,
                                const std::map<ClickPattern, double>& resolution = {});

namespace detail {
template <class Map>
void check_distribution(const Map& p) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("distribution has a negative or NaN entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("distribution does not sum to 1");
}
}  // namespace detail

/// Probability-theoretic fidelity F = sum_j sqrt(p_j q_j) over the union of outcomes.
template <class Map>
double fidelity(const Map& p, const Map& q) {
  detail::check_distribution(p);
  detail::check_distribution(q);
  double f = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    if (it != q.end()) f += std::sqrt(v * it->second);
  }
  return std::min(f, 1.0);
}

/// Normalized copy of a non-negative map.
template <class Map>
Map normalize(const Map& p) {
  double s = 0.0;
  for (const auto& [k, v] : p) s += v;
  Map out;
  if (s <= 0.0) return out;
  for (const auto& [k, v] : p) out[k] = v / s;
  return out;
}

/// Heralded photon statistics on the remaining modes with measured DC1/DC2
/// reflectivities and ideal DC3/DC4.
Distribution simulated_reference_distribution(double eta1, double eta2, const FockState& input,
                                              const HeraldPattern& pattern, double phi,
                                              double eta3 = 1.0 / 3.0, double eta4 = 1.0 / 3.0);

/// Heralds i and l on one detector each; j and k each fan out onto four
/// detectors with probability 1/4.
DetectionTopology tree_4x4_topology();

/// Looks up a named preset ("tree-4x4"); throws ConfigError otherwise.
DetectionTopology topology_preset(const std::string& name);

nlohmann::json to_json(const DetectionTopology& topology);
DetectionTopology topology_from_json(const nlohmann::json& j);

}  // namespace heraldsim
