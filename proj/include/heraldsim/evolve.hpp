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
#include <vector>

#include "heraldsim/fock.hpp"
#include "heraldsim/rng.hpp"
#include "heraldsim/types.hpp"

namespace heraldsim {

/// Hard cap on photons per term handled by the evolution engines.
inline constexpr int kMaxPhotons = 10;

/// Tolerance on max|U^dagger U - I| accepted by the evolution engines.
inline constexpr double kUnitarityTolerance = 1e-10;

/// Throws std::invalid_argument on a shape mismatch and NumericError when the
/// matrix is not unitary within kUnitarityTolerance.
void check_evolution_matrix(const Matrix& u, std::size_t modes);

/// Evolves `state` under the mode transformation a_k^dagger -> sum_j U_jk a_j^dagger
/// by expanding products of creation operators as polynomials.
FockState evolve(const Matrix& u, const FockState& state);

/// Same map as evolve(), built from transition_amplitude() over every output
/// ket of each photon-number sector. Independent of the polynomial engine.
FockState evolve_by_permanents(const Matrix& u, const FockState& state);

struct TransitionQuery {
  const Matrix& matrix;
  Occupation input;
  Occupation output;
};

/// <output| U |input> = Per(U[output rows, input cols]) / sqrt(prod s! prod t!).
/// Zero when the photon numbers differ.
cplx transition_amplitude(const TransitionQuery& query);
cplx transition_amplitude(const Matrix& u, const Occupation& input, const Occupation& output);

/// Output distribution of a basis input, enumerated with transition_amplitude().
Distribution output_distribution(const Matrix& u, const Occupation& input);

/// Cumulative table for repeated sampling from a discrete distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Distribution& dist);

  const Occupation& draw(Rng& rng) const;
  std::size_t size() const { return outcomes_.size(); }

 private:
  std::vector<Occupation> outcomes_;
  std::vector<double> cumulative_;
};

/// One draw from |<out|U|input>|^2 with a generator seeded by `seed`.
Occupation sample_output(const Matrix& u, const Occupation& input, std::uint64_t seed);

/// `shots` independent draws; deterministic in `seed` for any worker count.
std::vector<Occupation> sample_outputs(const Matrix& u, const Occupation& input, std::size_t shots,
                                       std::uint64_t seed, std::size_t workers = 0);

/// `shots` measurements of every mode of a (normalized) state.
std::vector<Occupation> sample_state(const FockState& state, std::size_t shots, std::uint64_t seed,
                                     std::size_t workers = 0);

/// Relative frequencies of the given samples.
Distribution empirical_distribution(const std::vector<Occupation>& samples);

/// 1/2 sum |p - q| over the union of outcomes.
template <class Map>
double total_variation(const Map& p, const Map& q) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q) {
    if (!p.contains(k)) s += std::abs(v);
  }
  return 0.5 * s;
}

}  // namespace heraldsim
