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

#include "heraldsim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "heraldsim/errors.hpp"
#include "heraldsim/evolve.hpp"
#include "heraldsim/rng.hpp"

namespace heraldsim {

namespace {

constexpr std::size_t kMaxLeaves = 16;

double ipow(double base, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= base;
  return r;
}

}  // namespace

void SplitterTree::validate() const {
  if (leaves.empty()) throw std::invalid_argument("splitter tree has no leaves");
  if (leaves.size() > kMaxLeaves) throw std::invalid_argument("splitter tree has too many leaves");
  for (const auto& leaf : leaves) {
    if (!(leaf.probability >= 0.0 && leaf.probability <= 1.0)) {
      throw std::invalid_argument("leaf probability must lie in [0, 1]");
    }
  }
  if (routed_probability() > 1.0 + 1e-12) throw std::invalid_argument("leaf probabilities sum above 1");
}

double SplitterTree::routed_probability() const {
  double s = 0.0;
  for (const auto& leaf : leaves) s += leaf.probability;
  return s;
}

double DetectorModel::efficiency_of(const std::string& detector) const {
  auto it = efficiency.find(detector);
  return it == efficiency.end() ? 1.0 : it->second;
}

void DetectionTopology::validate(std::size_t modes) const {
  std::set<std::size_t> seen_modes;
  std::set<std::string> seen_detectors;
  for (const auto& tree : trees) {
    tree.validate();
    if (modes != 0 && tree.mode >= modes) throw std::invalid_argument("splitter tree mode out of range");
    if (!seen_modes.insert(tree.mode).second) throw std::invalid_argument("two splitter trees cover the same mode");
    for (const auto& leaf : tree.leaves) {
      if (!seen_detectors.insert(leaf.detector).second) {
        throw std::invalid_argument("detector '" + leaf.detector + "' appears on more than one leaf");
      }
    }
  }
  for (const auto& [id, eff] : detectors.efficiency) {
    if (!(eff >= 0.0 && eff <= 1.0)) throw std::invalid_argument("detector efficiency must lie in [0, 1]");
  }
  if (detectors.dark_count_probability != 0.0) throw std::invalid_argument("dark counts are not modelled");
}

std::vector<std::string> DetectionTopology::detector_ids() const {
  std::vector<std::string> ids;
  for (const auto& tree : trees) {
    for (const auto& leaf : tree.leaves) ids.push_back(leaf.detector);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

const SplitterTree* DetectionTopology::tree_for(std::size_t mode) const {
  for (const auto& tree : trees) {
    if (tree.mode == mode) return &tree;
  }
  return nullptr;
}

std::string to_string(const ClickPattern& pattern) {
  if (pattern.empty()) return "-";
  std::string s;
  for (const auto& d : pattern) {
    if (!s.empty()) s += '+';
    s += d;
  }
  return s;
}

ClickPattern parse_click_pattern(const std::string& text) {
  ClickPattern p;
  if (text == "-" || text.empty()) return p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '+')) {
    if (item.empty()) throw std::invalid_argument("bad click pattern '" + text + "'");
    p.insert(item);
  }
  return p;
}

double cascade_resolve_probability(const SplitterTree& tree, int photons, const std::set<std::string>& targets) {
  tree.validate();
  if (photons < 0) throw std::invalid_argument("photon number must be non-negative");
  if (targets.size() > tree.leaves.size()) throw std::invalid_argument("more target detectors than leaves");
  if (static_cast<int>(targets.size()) != photons) {
    throw std::invalid_argument("number of target detectors must equal the photon number");
  }
  // Each bijection photons -> targets has probability prod p; there are n! of them.
  double p = 1.0;
  for (const auto& target : targets) {
    auto it = std::find_if(tree.leaves.begin(), tree.leaves.end(),
                           [&](const Leaf& leaf) { return leaf.detector == target; });
    if (it == tree.leaves.end()) throw std::invalid_argument("target detector '" + target + "' is not a leaf");
    p *= it->probability;
  }
  for (int k = 2; k <= photons; ++k) p *= k;
  return p;
}

ClickDistribution tree_click_distribution(const SplitterTree& tree, const DetectorModel& detectors, int photons) {
  tree.validate();
  if (detectors.number_resolving) {
    throw std::invalid_argument("number-resolving detection is modelled by exact herald projection, not click patterns");
  }
  const std::size_t n_leaves = tree.leaves.size();
  std::vector<double> q(n_leaves);
  for (std::size_t d = 0; d < n_leaves; ++d) {
    q[d] = tree.leaves[d].probability * detectors.efficiency_of(tree.leaves[d].detector);
  }
  const double lost = std::max(0.0, 1.0 - std::accumulate(q.begin(), q.end(), 0.0));

  // P(fired set == S) = sum_{T subset S} (-1)^{|S|-|T|} (lost + q_T)^n
  const std::size_t subsets = std::size_t{1} << n_leaves;
  std::vector<double> within(subsets);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    double s = lost;
    for (std::size_t d = 0; d < n_leaves; ++d) {
      if (mask & (std::size_t{1} << d)) s += q[d];
    }
    within[mask] = ipow(s, photons);
  }
  ClickDistribution out;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    double p = 0.0;
    // Enumerate submasks of `mask`, including 0.
    for (std::size_t sub = mask;; sub = (sub - 1) & mask) {
      const int parity = std::popcount(mask) - std::popcount(sub);
      p += (parity % 2 ? -1.0 : 1.0) * within[sub];
      if (sub == 0) break;
    }
    if (p <= 1e-15) continue;
    ClickPattern pattern;
    for (std::size_t d = 0; d < n_leaves; ++d) {
      if (mask & (std::size_t{1} << d)) pattern.insert(tree.leaves[d].detector);
    }
    out.emplace(std::move(pattern), p);
  }
  return out;
}

namespace {

void accumulate_clicks(const FockState& state, const DetectionTopology& topology, double weight,
                       std::map<std::pair<std::size_t, int>, ClickDistribution>& cache, ClickDistribution& out) {
  std::vector<std::size_t> covered;
  for (const auto& tree : topology.trees) covered.push_back(tree.mode);
  for (const auto& [occ, p_occ] : marginal_distribution(state, covered)) {
    ClickDistribution joint{{ClickPattern{}, 1.0}};
    for (std::size_t t = 0; t < topology.trees.size(); ++t) {
      const int n = occ[t];
      auto key = std::make_pair(t, n);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, tree_click_distribution(topology.trees[t], topology.detectors, n)).first;
      }
      ClickDistribution next;
      for (const auto& [pa, wa] : joint) {
        for (const auto& [pb, wb] : it->second) {
          ClickPattern merged = pa;
          merged.insert(pb.begin(), pb.end());
          next[std::move(merged)] += wa * wb;
        }
      }
      joint = std::move(next);
    }
    for (const auto& [pattern, w] : joint) out[pattern] += weight * p_occ * w;
  }
}

}  // namespace

ClickDistribution click_distribution(const FockState& state, const DetectionTopology& topology) {
  topology.validate(state.modes());
  std::map<std::pair<std::size_t, int>, ClickDistribution> cache;
  ClickDistribution out;
  accumulate_clicks(state, topology, 1.0, cache, out);
  return out;
}

ClickDistribution click_distribution(const Ensemble& ensemble, const DetectionTopology& topology) {
  std::map<std::pair<std::size_t, int>, ClickDistribution> cache;
  ClickDistribution out;
  for (const auto& member : ensemble) {
    topology.validate(member.state.modes());
    accumulate_clicks(member.state, topology, member.weight, cache, out);
  }
  return out;
}

double single_click_probability(const FockState& state, const DetectionTopology& topology, const std::string& detector) {
  topology.validate(state.modes());
  for (const auto& tree : topology.trees) {
    for (const auto& leaf : tree.leaves) {
      if (leaf.detector != detector) continue;
      const double q = leaf.probability * topology.detectors.efficiency_of(detector);
      double p = 0.0;
      const std::size_t mode[] = {tree.mode};
      for (const auto& [occ, w] : marginal_distribution(state, mode)) p += w * (1.0 - ipow(1.0 - q, occ[0]));
      return p;
    }
  }
  throw std::invalid_argument("unknown detector '" + detector + "'");
}

std::vector<ClickPattern> sample_clicks(const FockState& state, const DetectionTopology& topology,
                                        std::size_t shots, std::uint64_t seed, std::size_t workers) {
  topology.validate(state.modes());
  if (topology.detectors.number_resolving) {
    throw std::invalid_argument("number-resolving detection is modelled by exact herald projection, not click patterns");
  }
  std::vector<std::size_t> covered;
  for (const auto& tree : topology.trees) covered.push_back(tree.mode);
  const DiscreteSampler occupations(marginal_distribution(state, covered));
  // Per tree: cumulative routing table over leaves plus a final loss bucket.
  std::vector<std::vector<double>> routing;
  for (const auto& tree : topology.trees) {
    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& leaf : tree.leaves) {
      acc += leaf.probability * topology.detectors.efficiency_of(leaf.detector);
      cum.push_back(acc);
    }
    cum.push_back(std::max(acc, 1.0));
    routing.push_back(std::move(cum));
  }
  return run_streams<ClickPattern>(shots, seed, workers, [&](Rng& rng) {
    const Occupation& occ = occupations.draw(rng);
    ClickPattern pattern;
    for (std::size_t t = 0; t < topology.trees.size(); ++t) {
      for (int photon = 0; photon < occ[t]; ++photon) {
        const std::size_t leaf = rng.pick(routing[t]);
        if (leaf < topology.trees[t].leaves.size()) pattern.insert(topology.trees[t].leaves[leaf].detector);
      }
    }
    return pattern;
  });
}

ClickDistribution empirical_click_distribution(const std::vector<ClickPattern>& samples) {
  std::map<ClickPattern, std::size_t> counts;
  for (const auto& s : samples) ++counts[s];
  ClickDistribution d;
  for (const auto& [p, c] : counts) d[p] = static_cast<double>(c) / static_cast<double>(samples.size());
  return d;
}

Occupation clicks_per_mode(const ClickPattern& pattern, const DetectionTopology& topology,
                           std::span<const std::size_t> modes) {
  std::vector<int> counts;
  for (std::size_t mode : modes) {
    const SplitterTree* tree = topology.tree_for(mode);
    if (!tree) throw std::invalid_argument("no splitter tree on mode " + std::to_string(mode));
    int c = 0;
    for (const auto& leaf : tree->leaves) c += pattern.contains(leaf.detector) ? 1 : 0;
    counts.push_back(c);
  }
  return Occupation(std::move(counts));
}

NormalizedRates normalize_rates(const std::map<ClickPattern, double>& raw_counts,
                                const std::map<std::string, double>& singles,
                                const std::map<ClickPattern, double>& resolution) {
  NormalizedRates out;
  double sum = 0.0;
  std::size_t live = 0;
  for (const auto& [id, count] : singles) {
    if (count < 0.0) throw std::invalid_argument("negative singles count");
    if (count == 0.0) {
      out.flagged_detectors.push_back(id);
    } else {
      sum += count;
      ++live;
    }
  }
  if (live == 0) return out;
  const double mean = sum / static_cast<double>(live);
  ClickDistribution weights;
  for (const auto& [pattern, count] : raw_counts) {
    if (count < 0.0) throw std::invalid_argument("negative coincidence count");
    double scale = 1.0;
    bool flagged = false;
    for (const auto& d : pattern) {
      auto it = singles.find(d);
      if (it == singles.end()) throw std::invalid_argument("detector '" + d + "' has no singles count");
      if (it->second == 0.0) {
        flagged = true;
        break;
      }
      scale *= it->second / mean;
    }
    if (flagged) continue;
    if (auto r = resolution.find(pattern); r != resolution.end()) {
      if (!(r->second > 0.0)) throw std::invalid_argument("resolution probability must be positive");
      scale *= r->second;
    }
    weights[pattern] = count / scale;
  }
  out.distribution = normalize(weights);
  return out;
}

Distribution simulated_reference_distribution(double eta1, double eta2, const FockState& input,
                                              const HeraldPattern& pattern, double phi, double eta3, double eta4) {
  const HeraldResult r = heralded_output(ChipParams{eta1, eta2, eta3, eta4, phi}, input, pattern);
  if (!r.heralded) return {};
  return full_distribution(r.conditional_state);
}

DetectionTopology tree_4x4_topology() {
  DetectionTopology t;
  t.trees.push_back({chip_mode::i, {{"Di", 1.0}}});
  t.trees.push_back({chip_mode::j, {{"Dj1", 0.25}, {"Dj2", 0.25}, {"Dj3", 0.25}, {"Dj4", 0.25}}});
  t.trees.push_back({chip_mode::k, {{"Dk1", 0.25}, {"Dk2", 0.25}, {"Dk3", 0.25}, {"Dk4", 0.25}}});
  t.trees.push_back({chip_mode::l, {{"Dl", 1.0}}});
  return t;
}

DetectionTopology topology_preset(const std::string& name) {
  if (name == "tree-4x4") return tree_4x4_topology();
  throw ConfigError("unknown detection preset '" + name + "'");
}

nlohmann::json to_json(const DetectionTopology& topology) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : topology.trees) {
    nlohmann::json leaves = nlohmann::json::array();
    for (const auto& leaf : tree.leaves) leaves.push_back({{"det", leaf.detector}, {"p", leaf.probability}});
    trees.push_back({{"mode", tree.mode}, {"leaves", leaves}});
  }
  nlohmann::json eff = nlohmann::json::object();
  for (const auto& [id, e] : topology.detectors.efficiency) eff[id] = e;
  return {{"trees", trees}, {"efficiency", eff}, {"number_resolving", topology.detectors.number_resolving}};
}

DetectionTopology topology_from_json(const nlohmann::json& j) {
  DetectionTopology t;
  try {
    for (const auto& tree : j.at("trees")) {
      SplitterTree s;
      s.mode = tree.at("mode").get<std::size_t>();
      for (const auto& leaf : tree.at("leaves")) s.leaves.push_back({leaf.at("det").get<std::string>(), leaf.at("p").get<double>()});
      t.trees.push_back(std::move(s));
    }
    if (j.contains("efficiency")) {
      for (const auto& [id, e] : j.at("efficiency").items()) t.detectors.efficiency[id] = e.get<double>();
    }
    t.detectors.number_resolving = j.value("number_resolving", false);
    t.validate();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("topology JSON: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("topology JSON: ") + ex.what());
  }
  return t;
}

}  // namespace heraldsim
