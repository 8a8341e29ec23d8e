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
#include "heraldsim/analysis.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/herald.hpp"

using namespace heraldsim;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<FringeSample> sampled(double (*f)(double), std::size_t n, double span = 2.0 * kPi) {
  std::vector<FringeSample> out;
  for (double x : phase_grid(0.0, span, n)) out.push_back({x, f(x), ""});
  return out;
}

FringeScenario exact_scenario(const FockState& input, const Occupation& pattern) {
  FringeScenario s;
  s.input = input;
  s.exact = pattern;
  return s;
}

}  // namespace

TEST_CASE("period estimation") {
  CHECK(fringe_period(sampled([](double x) { return std::sin(x) * std::sin(x); }, 64)).period ==
        doctest::Approx(kPi).epsilon(1e-6));
  CHECK(fringe_period(sampled([](double x) { return 0.5 + 0.5 * std::cos(x); }, 64)).period ==
        doctest::Approx(2.0 * kPi).epsilon(1e-6));
  CHECK(fringe_period(sampled([](double x) { return 0.3 + 0.1 * std::cos(3.7 * x + 1.0); }, 100, 10.0)).period ==
        doctest::Approx(2.0 * kPi / 3.7).epsilon(1e-6));
  const FringeFit flat = fringe_period(sampled([](double) { return 0.25; }, 32));
  CHECK_FALSE(flat.has_fringe);
  CHECK(flat.visibility == 0.0);
  CHECK_THROWS_AS(fringe_period(sampled([](double x) { return std::cos(x); }, 7)), InsufficientSamples);
  const auto vis = fringe_period(sampled([](double x) { return 0.5 + 0.25 * std::cos(x); }, 64));
  CHECK(vis.visibility == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("unsorted samples give the same period") {
  auto s = sampled([](double x) { return std::cos(2.0 * x); }, 50);
  std::reverse(s.begin(), s.end());
  CHECK(fringe_period(s).period == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("precision bounds") {
  CHECK(precision_bounds(1).sql == 1.0);
  CHECK(precision_bounds(1).heisenberg == 1.0);
  CHECK(precision_bounds(4).sql == doctest::Approx(0.5));
  CHECK(precision_bounds(4).heisenberg == doctest::Approx(0.25));
  CHECK(precision_bounds(100).sql == doctest::Approx(0.1));
  CHECK(precision_bounds(100).heisenberg == doctest::Approx(0.01));
  CHECK_THROWS_AS(precision_bounds(0), std::invalid_argument);
}

TEST_CASE("chip fringes") {
  const auto grid = phase_grid(0.0, 2.0 * kPi, 256);
  const auto single = fringe_scan(exact_scenario(FockState::basis(Occupation{0, 1, 0, 0}), Occupation{0, 1, 0, 0}), grid);
  const auto six = fringe_scan(exact_scenario(chip_pair_input(3), Occupation{1, 4, 0, 1}), grid);
  const double p1 = fringe_period(single).period;
  const double p6 = fringe_period(six).period;
  CHECK(p1 == doctest::Approx(2.0 * kPi).epsilon(0.02));
  CHECK(p6 == doctest::Approx(kPi).epsilon(0.02));
  CHECK(p1 / p6 == doctest::Approx(2.0).epsilon(0.02));

  // |1,4,0,1> follows sin^2 and |1,3,1,1> follows cos^2.
  const auto other = fringe_scan(exact_scenario(chip_pair_input(3), Occupation{1, 3, 1, 1}), grid);
  const double top = six[64].probability;
  const double top_other = other[0].probability;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(six[k].probability == doctest::Approx(top * std::pow(std::sin(grid[k]), 2)).epsilon(1e-9));
    CHECK(other[k].probability == doctest::Approx(top_other * std::pow(std::cos(grid[k]), 2)).epsilon(1e-9));
  }
}

TEST_CASE("threshold click fringe") {
  FringeScenario s;
  s.input = chip_pair_input(3);
  s.clicks = ClickPattern{"Di", "Dj1", "Dj2", "Dj3", "Dj4", "Dl"};
  s.topology = tree_4x4_topology();
  const auto grid = phase_grid(0.0, 2.0 * kPi, 128);
  const auto samples = fringe_scan(s, grid);
  for (const auto& f : samples) CHECK(f.pattern == "Di+Dj1+Dj2+Dj3+Dj4+Dl");
  CHECK(fringe_period(samples).period == doctest::Approx(kPi).epsilon(0.02));
  FringeScenario both = s;
  both.exact = Occupation{1, 4, 0, 1};
  CHECK_THROWS_AS(fringe_scan(both, grid), std::invalid_argument);
  CHECK_THROWS_AS(fringe_scan(s, std::vector<double>{0.0, 1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("dense grid stays finite and in range") {
  const auto grid = phase_grid(0.0, 2.0 * kPi, 1000);
  const auto six = fringe_scan(exact_scenario(chip_pair_input(3), Occupation{1, 4, 0, 1}), grid);
  for (const auto& f : six) {
    CHECK(std::isfinite(f.probability));
    CHECK(f.probability >= 0.0);
    CHECK(f.probability <= 1.0);
  }
}

TEST_CASE("downstream-phase fringe frequency scales with the photon difference") {
  const auto grid = phase_grid(0.0, 2.0 * kPi, 256);
  const double base = fringe_period(noon_fringe(1, 0, grid)).period;
  CHECK(base / fringe_period(noon_fringe(2, 0, grid)).period == doctest::Approx(2.0).epsilon(0.02));
  CHECK(base / fringe_period(noon_fringe(3, 1, grid)).period == doctest::Approx(2.0).epsilon(0.02));
  CHECK(base / fringe_period(noon_fringe(4, 0, grid)).period == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("loop coherence witness") {
  const SagnacResult pure = sagnac_scenario(ChipParams{});
  const SagnacResult mixed = sagnac_scenario_dephased(ChipParams{});
  CHECK(pure.conditioned.at(Occupation{1, 1}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mixed.conditioned.at(Occupation{1, 1}) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(pure.extraction_probability == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
  CHECK(pure.raw.at(Occupation{1, 1}) == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
  CHECK(pure.herald_probability == doctest::Approx(4.0 / 81.0));

  const FockState ideal = make_noon({2, 0, 0.0, {0, 1}});
  CHECK(sagnac_reverse(ideal, ChipParams{}).conditioned.at(Occupation{1, 1}) == doctest::Approx(1.0));
  CHECK(sagnac_reverse(dephase(ideal), ChipParams{}).conditioned.at(Occupation{1, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(sagnac_reverse(FockState::basis(Occupation{1}), ChipParams{}), std::invalid_argument);
}
