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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "heraldsim/circuit.hpp"
#include "heraldsim/evolve.hpp"
#include "heraldsim/source.hpp"

using namespace heraldsim;

TEST_CASE("down-conversion state") {
  const SpdcParams p{0.1, 3, 1.0};
  const auto w = spdc_sector_weights(p);
  REQUIRE(w.size() == 4);
  const double z = 1.0 + 1e-2 + 1e-4 + 1e-6;
  CHECK(w[0] == doctest::Approx(1.0 / z));
  CHECK(w[2] == doctest::Approx(1e-4 / z));
  const FockState s = spdc_state(p);
  CHECK(s.norm() == doctest::Approx(1.0));
  CHECK(std::norm(s.amplitude(Occupation{3, 3})) == doctest::Approx(1e-6 / z));
  const FockState chip = chip_spdc_input(p);
  CHECK(chip.modes() == 4);
  CHECK(std::norm(chip.amplitude(Occupation{0, 1, 1, 0})) == doctest::Approx(1e-2 / z));
  const auto zero = spdc_sector_weights({0.0, 4, 1.0});
  CHECK(zero[0] == 1.0);
  CHECK_THROWS_AS(spdc_state({1.0, 2, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(spdc_state({0.1, 0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(spdc_state({0.1, 6, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(spdc_state({0.1, 2, 1.5}), std::invalid_argument);
}

TEST_CASE("distinguishable photons do not interfere") {
  const Matrix u = dc_matrix(0.5);
  const auto d = distinguishable_output_distribution(u, {Occupation{1, 0}, Occupation{0, 1}});
  CHECK(d.at(Occupation{1, 1}) == doctest::Approx(0.5));
  CHECK(d.at(Occupation{2, 0}) == doctest::Approx(0.25));
  const auto full = partially_distinguishable_distribution(u, {Occupation{1, 0}, Occupation{0, 1}}, 1.0);
  CHECK(full.at(Occupation{2, 0}) == doctest::Approx(0.5));
  const auto half = partially_distinguishable_distribution(u, {Occupation{1, 0}, Occupation{0, 1}}, 0.5);
  CHECK(half.at(Occupation{1, 1}) == doctest::Approx(0.25));
}

TEST_CASE("generalized two-pair dip") {
  const HomDip ideal = hom_dip(1.0, 0.5);
  CHECK(ideal.p_indistinguishable == doctest::Approx(0.25));
  CHECK(ideal.p_distinguishable == doctest::Approx(0.375));
  CHECK(ideal.visibility == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(hom_dip(0.0, 0.5).visibility == doctest::Approx(0.0));
  for (double o : {0.9, 0.95, 1.0}) {
    const double v = hom_dip(o, 0.5).visibility;
    CHECK(v >= 0.30);
    CHECK(v <= 0.38);
    CHECK(v == doctest::Approx(o / 3.0));
  }
  const HomDip single = hom_dip(1.0, 0.5, 1);
  CHECK(single.p_observed == doctest::Approx(0.0));
  CHECK(single.visibility == doctest::Approx(1.0));
}

TEST_CASE("heralding with partial overlap") {
  const PartialHerald ideal = heralded_distribution_with_overlap(ChipParams{}, 2, chip_herald(), 1.0);
  CHECK(ideal.probability == doctest::Approx(4.0 / 81.0));
  CHECK(ideal.conditional.at(Occupation{2, 0}) == doctest::Approx(0.5));
  const PartialHerald none = heralded_distribution_with_overlap(ChipParams{}, 2, chip_herald(), 0.0);
  double total = 0.0;
  for (const auto& [o, p] : none.conditional) total += p;
  CHECK(total == doctest::Approx(1.0));
  CHECK(none.conditional.contains(Occupation{1, 1}));
}

TEST_CASE("branch decomposition") {
  const FockState s(4, {{Occupation{1, 3, 1, 1}, 0.6}, {Occupation{1, 1, 3, 1}, cplx(0.0, 0.6)}, {Occupation{2, 2, 2, 0}, 0.529150262212918}});
  const std::array<std::size_t, 2> herald{0, 3};
  const auto branches = branch_decomposition(s, herald);
  REQUIRE(branches.size() == 2);
  const auto& b = branches[0].herald == Occupation{1, 1} ? branches[0] : branches[1];
  CHECK(b.n == 3);
  CHECK(b.m == 1);
  CHECK(b.magnitude == doctest::Approx(0.6 * std::sqrt(2.0)));
  CHECK(b.alpha == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("contamination report") {
  ChipParams chip;
  chip.phi = std::numbers::pi / 2;
  const auto topo = tree_4x4_topology();
  const auto r = contamination_report(chip, SpdcParams{0.085, 4, 1.0}, chip_herald(), topo);
  REQUIRE(r.sectors.size() == 5);
  CHECK(r.sectors[3].herald_probability == doctest::Approx(4.0 / 243.0));
  CHECK_FALSE(r.sectors[3].mislabeled);
  CHECK(r.sectors[4].mislabeled);
  CHECK(r.sectors[4].by_label.at(Occupation{2, 2}).false_probability > 0.0);
  CHECK(r.total_false_event_probability > 0.0);
  double weight = 0.0;
  for (const auto& s : r.sectors) weight += s.weight;
  CHECK(weight == doctest::Approx(1.0));

  bool found = false;
  for (const auto& b : r.sectors[4].branches) {
    if (b.herald == Occupation{2, 1} && b.n == 3 && b.m == 2) {
      CHECK(b.magnitude == doctest::Approx(1.0 / (27.0 * std::sqrt(3.0))).epsilon(1e-10));
      found = true;
    }
  }
  CHECK(found);

  CHECK(contamination_report(chip, SpdcParams{0.0, 4, 1.0}, chip_herald(), topo).empty());
  CHECK_THROWS_AS(contamination_report(chip, SpdcParams{0.085, 2, 1.0}, chip_herald(), topo), std::invalid_argument);
  const auto j = to_json(r);
  CHECK(j.at("sectors").size() == 5);
  CHECK(j.at("summary").size() == 5);
}
