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

#include "heraldsim/source.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "heraldsim/evolve.hpp"

namespace heraldsim {

void SpdcParams::validate() const {
  if (!(std::abs(xi) < 1.0)) throw std::invalid_argument("|xi| must be below 1");
  if (n_max < 1) throw std::invalid_argument("truncation order n_max must be at least 1");
  if (2 * n_max > kMaxPhotons) throw std::invalid_argument("truncation order exceeds the photon cap");
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("overlap must lie in [0, 1]");
}

std::vector<double> spdc_sector_weights(const SpdcParams& params) {
  params.validate();
  std::vector<double> w;
  double term = 1.0;
  double z = 0.0;
  for (int n = 0; n <= params.n_max; ++n) {
    w.push_back(term);
    z += term;
    term *= params.xi * params.xi;
  }
  for (double& x : w) x /= z;
  return w;
}

FockState spdc_state(const SpdcParams& params) {
  const auto weights = spdc_sector_weights(params);
  FockState::Terms t;
  double amp = 1.0;
  for (int n = 0; n <= params.n_max; ++n) {
    t.emplace(Occupation{n, n}, amp);
    amp *= params.xi;
  }
  return FockState(2, std::move(t)).normalized();
}

FockState chip_spdc_input(const SpdcParams& params) {
  return tensor(tensor(FockState::vacuum(1), spdc_state(params)), FockState::vacuum(1));
}

Distribution distinguishable_output_distribution(const Matrix& u, const std::vector<Occupation>& groups) {
  if (groups.empty()) throw std::invalid_argument("no photon groups");
  const std::size_t modes = static_cast<std::size_t>(u.rows());
  Distribution joint{{Occupation::vacuum(modes), 1.0}};
  for (const auto& g : groups) {
    if (g.modes() != modes) throw std::invalid_argument("group occupation length does not match the matrix");
    Distribution next;
    for (const auto& [out, p] : output_distribution(u, g)) {
      for (const auto& [acc, q] : joint) {
        std::vector<int> sum = acc.counts();
        for (std::size_t k = 0; k < modes; ++k) sum[k] += out[k];
        next[Occupation(std::move(sum))] += p * q;
      }
    }
    joint = std::move(next);
  }
  return joint;
}

Distribution partially_distinguishable_distribution(const Matrix& u, const std::vector<Occupation>& groups,
                                                    double overlap) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("overlap must lie in [0, 1]");
  std::vector<int> total(static_cast<std::size_t>(u.rows()), 0);
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < total.size() && k < g.modes(); ++k) total[k] += g[k];
  }
  Distribution mixed;
  if (overlap > 0.0) {
    for (const auto& [occ, p] : output_distribution(u, Occupation(total))) mixed[occ] += overlap * p;
  }
  if (overlap < 1.0) {
    for (const auto& [occ, p] : distinguishable_output_distribution(u, groups)) mixed[occ] += (1.0 - overlap) * p;
  }
  return mixed;
}

HomDip hom_dip(double overlap, double eta, int n) {
  if (n < 1) throw std::invalid_argument("HOM photon number must be positive");
  const Matrix u = dc_matrix(eta);
  const Occupation target{n, n};
  const std::vector<Occupation> groups{Occupation{n, 0}, Occupation{0, n}};
  HomDip r;
  r.p_indistinguishable = std::norm(transition_amplitude(u, target, target));
  const auto dist = distinguishable_output_distribution(u, groups);
  auto it = dist.find(target);
  r.p_distinguishable = it == dist.end() ? 0.0 : it->second;
  const auto mixed = partially_distinguishable_distribution(u, groups, overlap);
  auto jt = mixed.find(target);
  r.p_observed = jt == mixed.end() ? 0.0 : jt->second;
  r.visibility = r.p_distinguishable > 0.0 ? (r.p_distinguishable - r.p_observed) / r.p_distinguishable : 0.0;
  return r;
}

PartialHerald heralded_distribution_with_overlap(const ChipParams& chip, int n, const HeraldPattern& pattern,
                                                 double overlap) {
  const Matrix u = compile(chip_circuit(chip));
  const std::vector<Occupation> groups{Occupation{0, n, 0, 0}, Occupation{0, 0, n, 0}};
  const auto dist = partially_distinguishable_distribution(u, groups, overlap);
  std::vector<std::size_t> remaining;
  for (std::size_t m = 0; m < 4; ++m) {
    if (!pattern.requirements.contains(m)) remaining.push_back(m);
  }
  PartialHerald r;
  for (const auto& [occ, p] : dist) {
    if (!pattern.matches(occ)) continue;
    r.probability += p;
    r.conditional[occ.select(remaining)] += p;
  }
  r.conditional = normalize(r.conditional);
  return r;
}

std::vector<Branch> branch_decomposition(const FockState& output, std::span<const std::size_t> herald_modes,
                                         double min_magnitude) {
  std::vector<std::size_t> remaining;
  for (std::size_t m = 0; m < output.modes(); ++m) {
    if (std::find(herald_modes.begin(), herald_modes.end(), m) == herald_modes.end()) remaining.push_back(m);
  }
  if (remaining.size() != 2) throw std::invalid_argument("branch decomposition needs exactly two remaining modes");

  // herald counts -> remaining-mode ket -> amplitude
  std::map<Occupation, std::map<Occupation, cplx>> grouped;
  for (const auto& [occ, amp] : output.terms()) grouped[occ.select(herald_modes)][occ.select(remaining)] += amp;

  std::vector<Branch> out;
  for (const auto& [herald, kets] : grouped) {
    std::set<std::pair<int, int>> done;
    for (const auto& [ket, amp] : kets) {
      const int big = std::max(ket[0], ket[1]);
      const int small = std::min(ket[0], ket[1]);
      if (!done.insert({big, small}).second) continue;
      Branch b;
      b.herald = herald;
      b.n = big;
      b.m = small;
      auto find = [&](int x, int y) {
        auto it = kets.find(Occupation{x, y});
        return it == kets.end() ? cplx{} : it->second;
      };
      b.first = find(big, small);
      b.second = big == small ? b.first : find(small, big);
      b.magnitude = big == small ? std::abs(b.first) : std::hypot(std::abs(b.first), std::abs(b.second));
      if (big != small && b.first != cplx{} && b.second != cplx{}) b.alpha = std::arg(b.second / b.first);
      if (b.magnitude > min_magnitude) out.push_back(b);
    }
  }
  return out;
}

namespace {

// Per-occupation click classification for the target-event analysis.
void classify_events(const FockState& output, const HeraldPattern& pattern, const DetectionTopology& topology,
                     int target_clicks, SectorReport& report) {
  std::vector<std::size_t> remaining;
  for (std::size_t m = 0; m < output.modes(); ++m) {
    if (!pattern.requirements.contains(m)) remaining.push_back(m);
  }
  std::map<std::pair<std::size_t, int>, ClickDistribution> cache;
  for (const auto& [occ, p_occ] : full_distribution(output)) {
    ClickDistribution joint{{ClickPattern{}, 1.0}};
    for (std::size_t t = 0; t < topology.trees.size(); ++t) {
      const int n = occ[topology.trees[t].mode];
      auto key = std::make_pair(t, n);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, tree_click_distribution(topology.trees[t], topology.detectors, n)).first;
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
    const Occupation herald_truth = [&] {
      std::vector<std::size_t> hm;
      for (const auto& [m, c] : pattern.requirements) hm.push_back(m);
      return occ.select(hm);
    }();
    bool herald_exact = true;
    {
      std::size_t idx = 0;
      for (const auto& [m, c] : pattern.requirements) herald_exact &= herald_truth[idx++] == c;
    }
    for (const auto& [clicks, w] : joint) {
      bool herald_ok = true;
      for (const auto& [m, c] : pattern.requirements) {
        const std::size_t mode[] = {m};
        herald_ok &= clicks_per_mode(clicks, topology, mode)[0] == c;
      }
      if (!herald_ok) continue;
      const Occupation label = clicks_per_mode(clicks, topology, remaining);
      if (label.total() != target_clicks) continue;
      const double p = p_occ * w;
      auto& ev = report.by_label[label];
      ev.event_probability += p;
      report.event_probability += p;
      if (!herald_exact || occ.select(remaining) != label) {
        ev.false_probability += p;
        report.false_event_probability += p;
      }
    }
  }
  report.mislabeled = report.false_event_probability > 1e-15;
}

}  // namespace

ContaminationReport contamination_report(const ChipParams& chip, const SpdcParams& params,
                                         const HeraldPattern& pattern, const DetectionTopology& topology,
                                         int target_sector) {
  params.validate();
  if (target_sector < 1) throw std::invalid_argument("target sector must be positive");
  if (params.n_max < target_sector) {
    throw std::invalid_argument("truncation n_max=" + std::to_string(params.n_max) + " is below the target sector " +
                                std::to_string(target_sector) + " (" + std::to_string(2 * target_sector) +
                                "-photon events)");
  }
  topology.validate(4);
  for (const auto& [mode, count] : pattern.requirements) {
    if (!topology.tree_for(mode)) throw std::invalid_argument("herald mode has no detector tree");
  }

  ContaminationReport report;
  report.chip = chip;
  report.params = params;
  report.target_sector = target_sector;
  const Matrix u = compile(chip_circuit(chip));
  const auto weights = spdc_sector_weights(params);
  const int target_clicks = 2 * target_sector - pattern.photons();
  std::vector<std::size_t> herald_modes;
  for (const auto& [m, c] : pattern.requirements) herald_modes.push_back(m);

  report.sectors.resize(weights.size());
  parallel_for(weights.size(), 0, [&](std::size_t n) {
    SectorReport& s = report.sectors[n];
    s.sector = static_cast<int>(n);
    s.weight = weights[n];
    const FockState output = evolve(u, chip_pair_input(static_cast<int>(n)));
    const HeraldResult h = project(output, pattern);
    s.herald_probability = h.probability;
    if (h.heralded) s.conditional_distribution = full_distribution(h.conditional_state);
    classify_events(output, pattern, topology, target_clicks, s);
    if (herald_modes.size() + 2 == output.modes()) {
      std::vector<Branch> all = branch_decomposition(output, herald_modes);
      for (auto& b : all) {
        bool fires = true;
        for (int c : b.herald.counts()) fires &= c >= 1;
        if (fires) s.branches.push_back(std::move(b));
      }
    }
  });
  for (const auto& s : report.sectors) {
    report.total_herald_probability += s.weight * s.herald_probability;
    report.total_event_probability += s.weight * s.event_probability;
    report.total_false_event_probability += s.weight * s.false_event_probability;
  }
  return report;
}

nlohmann::json to_json(const ContaminationReport& report) {
  nlohmann::json sectors = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : report.sectors) {
    nlohmann::json dist = nlohmann::json::object();
    for (const auto& [occ, p] : s.conditional_distribution) dist[occ.to_string()] = p;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [label, ev] : s.by_label) {
      labels[label.to_string()] = {{"event_prob", ev.event_probability}, {"false_prob", ev.false_probability}};
    }
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& b : s.branches) {
      branches.push_back({{"herald", b.herald.counts()},
                          {"n", b.n},
                          {"m", b.m},
                          {"magnitude", b.magnitude},
                          {"alpha", b.alpha},
                          {"first", {b.first.real(), b.first.imag()}},
                          {"second", {b.second.real(), b.second.imag()}}});
    }
    sectors.push_back({{"sector", s.sector},
                       {"photons", 2 * s.sector},
                       {"weight", s.weight},
                       {"herald_prob", s.herald_probability},
                       {"conditional_distribution", dist},
                       {"event_prob", s.event_probability},
                       {"false_event_prob", s.false_event_probability},
                       {"mislabeled", s.mislabeled},
                       {"labels", labels},
                       {"branches", branches}});
    summary.push_back({{"sector", s.sector},
                       {"herald_prob", s.weight * s.herald_probability},
                       {"false_event_prob", s.weight * s.false_event_probability}});
  }
  return {{"xi", report.params.xi},
          {"n_max", report.params.n_max},
          {"phi", report.chip.phi},
          {"eta", {report.chip.eta1, report.chip.eta2, report.chip.eta3, report.chip.eta4}},
          {"target_sector", report.target_sector},
          {"total_herald_prob", report.total_herald_probability},
          {"total_event_prob", report.total_event_probability},
          {"total_false_event_prob", report.total_false_event_probability},
          {"empty", report.empty()},
          {"sectors", sectors},
          {"summary", summary}};
}

}  // namespace heraldsim
