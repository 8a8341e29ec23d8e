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

#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heraldsim/types.hpp"
#include "json.hpp"

namespace heraldsim {

inline constexpr double kDefaultPruneEpsilon = 1e-14;

/// Photon counts per optical mode. Ordered lexicographically.
class Occupation {
 public:
  Occupation() = default;
  explicit Occupation(std::vector<int> counts);
  Occupation(std::initializer_list<int> counts);

  /// All-zero occupation on `modes` modes.
  static Occupation vacuum(std::size_t modes);

  std::size_t modes() const { return counts_.size(); }
  int total() const;
  int operator[](std::size_t mode) const { return counts_[mode]; }
  const std::vector<int>& counts() const { return counts_; }

  /// Copy with `delta` photons added to `mode`; throws if the result is negative.
  Occupation with_added(std::size_t mode, int delta) const;

  /// Counts of the selected modes, in the order given.
  Occupation select(std::span<const std::size_t> modes) const;

  /// Concatenation, `this` first.
  Occupation concat(const Occupation& other) const;

  /// Colon-separated counts, e.g. "2:0".
  std::string to_string() const;
  static Occupation parse(const std::string& text);

  auto operator<=>(const Occupation&) const = default;
  bool operator==(const Occupation&) const = default;

 private:
  std::vector<int> counts_;
};

/// Every occupation of `photons` photons over `modes` modes, in lexicographic order.
std::vector<Occupation> enumerate_basis(int photons, std::size_t modes);

/// Number of basis kets of `photons` photons in `modes` modes, C(n+m-1, n).
std::size_t basis_dimension(int photons, std::size_t modes);

/// Sparse pure state of bosonic modes in the Fock basis.
///
/// Immutable: every operation returns a new state. Amplitudes with magnitude
/// at or below the pruning epsilon are dropped on construction.
class FockState {
 public:
  using Terms = std::map<Occupation, cplx>;

  FockState() = default;
  FockState(std::size_t modes, Terms terms, double prune_eps = kDefaultPruneEpsilon);

  /// Single ket |occ> with amplitude 1.
  static FockState basis(const Occupation& occ);
  static FockState vacuum(std::size_t modes);

  std::size_t modes() const { return modes_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Amplitude of `occ`, zero when absent.
  cplx amplitude(const Occupation& occ) const;

  double squared_norm() const;
  double norm() const;

  /// Copy scaled to unit norm; a zero state stays zero.
  FockState normalized() const;
  FockState scaled(cplx factor) const;

  /// Sum of two states on the same modes.
  FockState plus(const FockState& other) const;

  /// Distinct total photon numbers present.
  std::vector<int> photon_numbers() const;

  /// Keep only the sector with `photons` total photons.
  FockState sector(int photons) const;

  /// Reorders modes: mode k of the result is mode `order[k]` of this state.
  FockState permute_modes(std::span<const std::size_t> order) const;

 private:
  std::size_t modes_ = 0;
  Terms terms_;
};

/// (|N,M> + e^{i alpha}|M,N>)/sqrt(2) on a pair of modes.
struct NoonSpec {
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  std::pair<std::size_t, std::size_t> mode_pair{0, 1};
};

/// Builds the |N::M> state. The state lives on `modes` modes (at least two);
/// N photons sit on `mode_pair.first` in the first ket. N == M yields the
/// single ket |N,N>.
FockState make_noon(const NoonSpec& spec, std::size_t modes = 2);

FockState tensor(const FockState& a, const FockState& b);

/// <a|b>, conjugate-linear in `a`.
cplx inner_product(const FockState& a, const FockState& b);

/// |<a|b>|^2 / (|a|^2 |b|^2); insensitive to global phase.
double overlap_fidelity(const FockState& a, const FockState& b);

using Distribution = std::map<Occupation, double>;

/// Photon-number distribution of the selected modes (in the order given),
/// tracing out the rest. Sums to the squared norm of `state`.
Distribution marginal_distribution(const FockState& state, std::span<const std::size_t> modes);

/// Distribution over every mode of the state.
Distribution full_distribution(const FockState& state);

/// A weighted set of pure states standing in for a mixed state.
struct WeightedState {
  double weight = 0.0;
  FockState state;
};
using Ensemble = std::vector<WeightedState>;

/// Weighted sum of the members' marginal distributions.
Distribution ensemble_distribution(const Ensemble& ensemble, std::span<const std::size_t> modes);

/// Replaces a pure state by the incoherent mixture of its basis kets.
Ensemble dephase(const FockState& state);

nlohmann::json to_json(const FockState& state);
FockState state_from_json(const nlohmann::json& j);

}  // namespace heraldsim
