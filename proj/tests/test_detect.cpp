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
#include <functional>

#include "doctest.h"
#include "heraldsim/detect.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/evolve.hpp"

using namespace heraldsim;

namespace {

SplitterTree uniform_tree(std::size_t mode, const std::string& prefix, int leaves) {
  SplitterTree t{mode, {}};
  for (int k = 1; k <= leaves; ++k) t.leaves.push_back({prefix + std::to_string(k), 1.0 / leaves});
  return t;
}

/// Routes every photon to every leaf or to loss and collects the fired sets.
ClickDistribution routed_clicks(const SplitterTree& tree, const DetectorModel& model, int photons) {
  std::vector<double> q;
  for (const auto& leaf : tree.leaves) q.push_back(leaf.probability * model.efficiency_of(leaf.detector));
  double lost = 1.0;
  for (double v : q) lost -= v;
  ClickDistribution out;
  std::function<void(int, double, ClickPattern)> rec = [&](int left, double p, ClickPattern fired) {
    if (left == 0) {
      out[fired] += p;
      return;
    }
    rec(left - 1, p * lost, fired);
    for (std::size_t d = 0; d < q.size(); ++d) {
      ClickPattern next = fired;
      next.insert(tree.leaves[d].detector);
      rec(left - 1, p * q[d], next);
    }
  };
  rec(photons, 1.0, {});
  return out;
}

}  // namespace

TEST_CASE("cascade resolution probabilities") {
  const SplitterTree t = uniform_tree(0, "D", 4);
  CHECK(cascade_resolve_probability(t, 4, {"D1", "D2", "D3", "D4"}) == doctest::Approx(3.0 / 32.0).epsilon(1e-12));
  CHECK(cascade_resolve_probability(t, 3, {"D1", "D2", "D3"}) * 0.25 == doctest::Approx(3.0 / 128.0).epsilon(1e-12));
  CHECK(cascade_resolve_probability(t, 0, {}) == 1.0);
  CHECK_THROWS_AS(cascade_resolve_probability(t, 2, {"D1"}), std::invalid_argument);
  CHECK_THROWS_AS(cascade_resolve_probability(t, 1, {"X"}), std::invalid_argument);
  CHECK_THROWS_AS(cascade_resolve_probability(uniform_tree(0, "D", 2), 3, {"D1", "D2", "D3"}), std::invalid_argument);
}

TEST_CASE("tree click distribution matches brute-force routing") {
  DetectorModel model;
  model.efficiency = {{"D2", 0.7}, {"D3", 0.9}};
  SplitterTree lossy{0, {{"D1", 0.3}, {"D2", 0.3}, {"D3", 0.2}}};
  for (int n = 0; n <= 5; ++n) {
    const auto exact = tree_click_distribution(lossy, model, n);
    const auto brute = routed_clicks(lossy, model, n);
    double total = 0.0;
    for (const auto& [p, v] : exact) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [p, v] : brute) {
      auto it = exact.find(p);
      CHECK(std::abs((it == exact.end() ? 0.0 : it->second) - v) < 1e-12);
    }
  }
  DetectorModel resolving;
  resolving.number_resolving = true;
  CHECK_THROWS_AS(tree_click_distribution(lossy, resolving, 2), std::invalid_argument);
}

TEST_CASE("topology validation") {
  DetectionTopology t;
  t.trees = {uniform_tree(0, "A", 2), uniform_tree(0, "B", 2)};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.trees = {uniform_tree(0, "A", 2), uniform_tree(1, "A", 2)};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.trees = {uniform_tree(5, "A", 2)};
  CHECK_THROWS_AS(t.validate(4), std::invalid_argument);
  t.trees = {SplitterTree{0, {{"A", 0.7}, {"B", 0.7}}}};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.trees = {uniform_tree(0, "A", 17)};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.trees = {uniform_tree(0, "A", 2)};
  t.detectors.dark_count_probability = 0.01;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("state click distribution") {
  const DetectionTopology topo = tree_4x4_topology();
  CHECK(topo.detector_ids().size() == 10);
  const FockState s = FockState::basis(Occupation{1, 4, 0, 1});
  const auto dist = click_distribution(s, topo);
  const ClickPattern all{"Di", "Dj1", "Dj2", "Dj3", "Dj4", "Dl"};
  CHECK(dist.at(all) == doctest::Approx(3.0 / 32.0).epsilon(1e-12));
  double total = 0.0;
  for (const auto& [p, v] : dist) total += v;
  CHECK(total == doctest::Approx(1.0));
  const std::array<std::size_t, 2> jk{1, 2};
  CHECK(clicks_per_mode(all, topo, jk) == Occupation{4, 0});
  CHECK(single_click_probability(s, topo, "Dj1") == doctest::Approx(1.0 - std::pow(0.75, 4)));
  CHECK_THROWS_AS(single_click_probability(s, topo, "Dx"), std::invalid_argument);

  const FockState noon = make_noon({2, 0, 0.0, {1, 2}}, 4);
  const auto mixed = click_distribution(dephase(noon), topo);
  const auto pure = click_distribution(noon, topo);
  for (const auto& [p, v] : pure) CHECK(mixed.at(p) == doctest::Approx(v));
}

TEST_CASE("sampled clicks converge and are deterministic") {
  const DetectionTopology topo = tree_4x4_topology();
  const FockState s = make_noon({2, 0, 0.0, {1, 2}}, 4);
  const auto a = sample_clicks(s, topo, 100000, 42, 1);
  CHECK(a == sample_clicks(s, topo, 100000, 42, 4));
  CHECK(total_variation(empirical_click_distribution(a), click_distribution(s, topo)) < 0.01);
  // Many more outcomes: the sampling floor of the distance grows with the support.
  const FockState wide = make_noon({3, 1, 0.0, {1, 2}}, 4);
  const auto b = sample_clicks(wide, topo, 400000, 43);
  CHECK(total_variation(empirical_click_distribution(b), click_distribution(wide, topo)) < 0.01);
}

TEST_CASE("pattern strings") {
  const ClickPattern p{"D2", "D1"};
  CHECK(to_string(p) == "D1+D2");
  CHECK(parse_click_pattern("D1+D2") == p);
  CHECK(to_string(ClickPattern{}) == "-");
  CHECK(parse_click_pattern("-").empty());
  CHECK_THROWS_AS(parse_click_pattern("D1++D2"), std::invalid_argument);
}

TEST_CASE("fidelity") {
  const Distribution p{{Occupation{2, 0}, 0.5}, {Occupation{0, 2}, 0.5}};
  const Distribution q{{Occupation{2, 0}, 1.0}};
  const Distribution r{{Occupation{1, 1}, 1.0}};
  CHECK(fidelity(p, p) == doctest::Approx(1.0));
  CHECK(fidelity(q, r) == 0.0);
  CHECK(fidelity(p, q) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(fidelity(p, Distribution{{Occupation{2, 0}, 0.7}}), std::invalid_argument);
  CHECK_THROWS_AS(fidelity(p, Distribution{{Occupation{2, 0}, 1.5}, {Occupation{0, 2}, -0.5}}), std::invalid_argument);
}

TEST_CASE("singles-based normalization") {
  const ClickPattern ab{"A", "B"}, ac{"A", "C"}, bd{"B", "D"};
  const std::map<ClickPattern, double> raw{{ab, 200.0}, {ac, 100.0}, {bd, 50.0}};
  const std::map<std::string, double> singles{{"A", 2000.0}, {"B", 1000.0}, {"C", 1000.0}, {"D", 0.0}};
  const NormalizedRates n = normalize_rates(raw, singles);
  CHECK(n.flagged_detectors == std::vector<std::string>{"D"});
  CHECK_FALSE(n.distribution.contains(bd));
  // mean singles 4000/3: A has 1.5, B and C 0.75, so both patterns scale by 1.125.
  CHECK(n.distribution.at(ab) == doctest::Approx(2.0 / 3.0));
  CHECK(n.distribution.at(ac) == doctest::Approx(1.0 / 3.0));
  const NormalizedRates res = normalize_rates(raw, singles, {{ab, 0.5}});
  CHECK(res.distribution.at(ab) == doctest::Approx(0.8));
  CHECK_THROWS_AS(normalize_rates({{ClickPattern{"Z"}, 1.0}}, singles), std::invalid_argument);
}

TEST_CASE("topology JSON and presets") {
  const DetectionTopology t = tree_4x4_topology();
  const DetectionTopology back = topology_from_json(to_json(t));
  CHECK(back.detector_ids() == t.detector_ids());
  CHECK(topology_preset("tree-4x4").trees.size() == 4);
  CHECK_THROWS_AS(topology_preset("none"), ConfigError);
  CHECK_THROWS_AS(topology_from_json(nlohmann::json{{"trees", 3}}), ConfigError);
}
