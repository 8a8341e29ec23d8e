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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "heraldsim/types.hpp"
#include "json.hpp"

namespace heraldsim {

/// Two-mode coupler with reflectivity `eta`, matrix
/// [[sqrt(eta), i sqrt(1-eta)], [i sqrt(1-eta), sqrt(eta)]] on (modes.first, modes.second).
struct DirectionalCoupler {
  double eta = 0.5;
  std::pair<std::size_t, std::size_t> modes{0, 1};
};

/// Multiplies the creation operator of `mode` by e^{i phi}.
struct PhaseShifter {
  double phi = 0.0;
  std::size_t mode = 0;
};

/// Couples `mode` to a dedicated environment mode with transmission `t`;
/// amplitude sqrt(1-t) leaks into `env_mode`.
struct LossTap {
  double transmission = 1.0;
  std::size_t mode = 0;
  std::size_t env_mode = 0;
};

using Element = std::variant<DirectionalCoupler, PhaseShifter, LossTap>;

/// Ordered list of optical elements over `mode_count` modes. Elements act in
/// list order: the first element touches the input state first.
struct Interferometer {
  std::size_t mode_count = 0;
  std::vector<Element> elements;
  /// Optional mode names; several names may refer to the same mode.
  std::map<std::string, std::size_t> labels;

  /// Throws std::invalid_argument on out-of-range parameters or mode indices.
  void validate() const;

  bool has_loss() const;

  /// Index of a labelled mode; throws std::out_of_range for unknown labels.
  std::size_t mode_of(const std::string& label) const;
};

Eigen::Matrix2cd dc_matrix(double eta);

/// Embeds the element's matrix into an identity on `modes` modes.
Matrix element_matrix(const Element& element, std::size_t modes);

/// Ordered product E_n ... E_2 E_1 of the element matrices.
Matrix compile(const Interferometer& circuit);

/// max |U^dagger U - I|.
double unitarity_defect(const Matrix& u);

/// Reflectivities and internal phase of the four-coupler heralding chip.
struct ChipParams {
  double eta1 = 0.5;
  double eta2 = 0.5;
  double eta3 = 1.0 / 3.0;
  double eta4 = 1.0 / 3.0;
  double phi = 0.0;
};

/// Chip mode indices. Input ports a,b,c,d; outputs i,j,k,l; internal paths
/// e,f (after DC1) and g,h (before DC2) share the same indices.
namespace chip_mode {
inline constexpr std::size_t a = 0, b = 1, c = 2, d = 3;
inline constexpr std::size_t e = 1, f = 2, g = 1, h = 2;
inline constexpr std::size_t i = 0, j = 1, k = 2, l = 3;
}  // namespace chip_mode

/// DC1 on (b,c), phase phi on f, DC3 on (a,e), DC4 on (f,d), DC2 on (g,h).
Interferometer chip_circuit(const ChipParams& params);

/// Appends a loss tap on `mode` routed to a fresh environment mode.
Interferometer with_loss(const Interferometer& circuit, std::size_t mode, double transmission);

nlohmann::json to_json(const Interferometer& circuit);

/// Parses the circuit schema. Loss elements without an "env" field get a
/// fresh environment mode appended after the declared modes, in order.
Interferometer circuit_from_json(const nlohmann::json& j);

}  // namespace heraldsim
