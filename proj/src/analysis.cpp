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

#include "heraldsim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "heraldsim/errors.hpp"
#include "heraldsim/evolve.hpp"
#include "heraldsim/herald.hpp"
#include "heraldsim/rng.hpp"

namespace heraldsim {

void FringeScenario::validate() const {
  if (input.modes() != 4) throw std::invalid_argument("fringe input must live on the four chip modes");
  if (exact.has_value() == clicks.has_value())
    throw std::invalid_argument("fringe scenario needs exactly one of an exact pattern or a click pattern");
  if (exact && exact->modes() != 4) throw std::invalid_argument("exact pattern must cover the four chip outputs");
  if (clicks) topology.validate(4);
}

std::string FringeScenario::pattern_label() const {
  return exact ? exact->to_string() : to_string(*clicks);
}

std::vector<FringeSample> fringe_scan(const FringeScenario& scenario, std::span<const double> phi_grid,
                                      std::size_t workers) {
  scenario.validate();
  if (phi_grid.size() < 4) throw std::invalid_argument("fringe scan needs at least 4 phase points");
  const std::string label = scenario.pattern_label();
  std::vector<FringeSample> out(phi_grid.size());
  parallel_for(phi_grid.size(), workers, [&](std::size_t idx) {
    ChipParams chip = scenario.chip;
    chip.phi = phi_grid[idx];
    const FockState state = evolve(compile(chip_circuit(chip)), scenario.input);
    double p = 0.0;
    if (scenario.exact) {
      p = std::norm(state.amplitude(*scenario.exact));
    } else {
      const auto dist = click_distribution(state, scenario.topology);
      auto it = dist.find(*scenario.clicks);
      p = it == dist.end() ? 0.0 : it->second;
    }
    out[idx] = {phi_grid[idx], std::clamp(p, 0.0, 1.0), label};
  });
  return out;
}

namespace {

/// Fraction of variance explained by c + a cos(w x) + b sin(w x).
double explained_fraction(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double tss, double w) {
  Eigen::MatrixXd design(x.size(), 3);
  design.col(0).setOnes();
  design.col(1) = (w * x).array().cos().matrix();
  design.col(2) = (w * x).array().sin().matrix();
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
  const double rss = (design * coef - y).squaredNorm();
  return 1.0 - rss / tss;
}

}  // namespace

FringeFit fringe_period(std::span<const FringeSample> samples) {
  if (samples.size() < 8) throw InsufficientSamples("fringe period needs at least 8 samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[k] = samples[static_cast<std::size_t>(k)].phi;
    y[k] = samples[static_cast<std::size_t>(k)].probability;
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) throw std::invalid_argument("fringe samples must be finite");
  }
  const double span = x.maxCoeff() - x.minCoeff();
  if (!(span > 0.0)) throw InsufficientSamples("fringe samples must span a non-zero phase range");

  FringeFit fit;
  const double ymax = y.maxCoeff(), ymin = y.minCoeff();
  if (ymax + ymin > 0.0) fit.visibility = (ymax - ymin) / (ymax + ymin);
  const double tss = (y.array() - y.mean()).square().sum();
  if (tss <= 1e-24 * static_cast<double>(n) || ymax - ymin <= 1e-12 * std::max(1.0, std::abs(ymax))) {
    fit.visibility = 0.0;
    return fit;
  }

  const double w_min = std::numbers::pi / span;
  const double w_max = std::numbers::pi * static_cast<double>(n - 1) / span;
  const double step = 2.0 * std::numbers::pi / span / 16.0;
  double best_w = w_min, best = -INFINITY;
  for (double w = w_min; w <= w_max; w += step) {
    const double e = explained_fraction(x, y, tss, w);
    if (e > best + 1e-12) {
      best = e;
      best_w = w;
    }
  }

  // Golden-section refinement around the coarse maximum.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = std::max(w_min, best_w - step), hi = std::min(w_max, best_w + step);
  double c = hi - kInvPhi * (hi - lo), d = lo + kInvPhi * (hi - lo);
  double fc = explained_fraction(x, y, tss, c), fd = explained_fraction(x, y, tss, d);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * best_w; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = explained_fraction(x, y, tss, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = explained_fraction(x, y, tss, d);
    }
  }
  const double w = 0.5 * (lo + hi);
  const double e = explained_fraction(x, y, tss, w);
  fit.has_fringe = true;
  fit.angular_frequency = e >= best ? w : best_w;
  fit.explained = std::max(e, best);
  fit.period = 2.0 * std::numbers::pi / fit.angular_frequency;
  return fit;
}

PrecisionBounds precision_bounds(int n_photons) {
  if (n_photons < 1) throw std::invalid_argument("photon number must be at least 1");
  const double n = n_photons;
  return {1.0 / std::sqrt(n), 1.0 / n};
}

std::vector<FringeSample> noon_fringe(int n, int m, std::span<const double> theta_grid) {
  if (theta_grid.empty()) throw std::invalid_argument("empty phase grid");
  const FockState state = make_noon({n, m, 0.0, {0, 1}});
  std::vector<Distribution> dists;
  dists.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    Eigen::Matrix2cd phase = Eigen::Matrix2cd::Identity();
    phase(0, 0) = std::polar(1.0, theta);
    const Matrix u = dc_matrix(0.5) * phase;
    dists.push_back(full_distribution(evolve(u, state)));
  }
  std::map<Occupation, std::vector<double>> series;
  for (std::size_t t = 0; t < dists.size(); ++t) {
    for (const auto& occ : enumerate_basis(n + m, 2)) {
      auto it = dists[t].find(occ);
      series[occ].push_back(it == dists[t].end() ? 0.0 : it->second);
    }
  }
  const Occupation* pick = nullptr;
  double best = -1.0;
  for (const auto& [occ, ys] : series) {
    double mean = 0.0;
    for (double v : ys) mean += v;
    mean /= static_cast<double>(ys.size());
    double var = 0.0;
    for (double v : ys) var += (v - mean) * (v - mean);
    if (var > best + 1e-15) {
      best = var;
      pick = &occ;
    }
  }
  std::vector<FringeSample> out;
  const auto& ys = series.at(*pick);
  for (std::size_t t = 0; t < theta_grid.size(); ++t) out.push_back({theta_grid[t], ys[t], pick->to_string()});
  return out;
}

std::vector<double> phase_grid(double start, double stop, std::size_t points) {
  if (points == 0) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(points);
  return grid;
}

namespace {

struct ReverseOutcome {
  Distribution raw;
  Distribution extracted;
  double extraction = 0.0;
};

ReverseOutcome reverse_pass(const FockState& jk, const ChipParams& chip) {
  if (jk.modes() != 2) throw std::invalid_argument("reverse pass expects a state on (j, k)");
  using namespace chip_mode;
  // Zero-phase loop: the photon leaving j re-enters at k and vice versa.
  const std::array<std::size_t, 2> swap{1, 0};
  const FockState looped = jk.permute_modes(swap);
  const FockState full = tensor(tensor(FockState::vacuum(1), looped), FockState::vacuum(1));

  Interferometer back;
  back.mode_count = 4;
  back.elements = {DirectionalCoupler{chip.eta2, {g, h}}, DirectionalCoupler{chip.eta3, {a, e}},
                   DirectionalCoupler{chip.eta4, {f, d}}};
  const FockState out = evolve(compile(back), full);

  ReverseOutcome r;
  const std::array<std::size_t, 2> ad{a, d};
  r.raw = marginal_distribution(out, ad);
  for (const auto& [occ, amp] : out.terms()) {
    if (occ[e] != 0 || occ[f] != 0) continue;
    const double p = std::norm(amp);
    r.extraction += p;
    r.extracted[occ.select(ad)] += p;
  }
  return r;
}

SagnacResult finish(ReverseOutcome r) {
  SagnacResult s;
  s.raw = std::move(r.raw);
  s.extraction_probability = r.extraction;
  s.conditioned = normalize(r.extracted);
  return s;
}

}  // namespace

SagnacResult sagnac_reverse(const FockState& jk_state, const ChipParams& chip) {
  SagnacResult s = finish(reverse_pass(jk_state.normalized(), chip));
  s.forward_state = jk_state;
  s.herald_probability = 1.0;
  return s;
}

SagnacResult sagnac_reverse(const Ensemble& jk_ensemble, const ChipParams& chip) {
  ReverseOutcome total;
  double weight = 0.0;
  for (const auto& member : jk_ensemble) {
    if (member.weight < 0.0) throw std::invalid_argument("ensemble weights must be non-negative");
    if (member.weight == 0.0) continue;
    const ReverseOutcome r = reverse_pass(member.state.normalized(), chip);
    for (const auto& [k, v] : r.raw) total.raw[k] += member.weight * v;
    for (const auto& [k, v] : r.extracted) total.extracted[k] += member.weight * v;
    total.extraction += member.weight * r.extraction;
    weight += member.weight;
  }
  if (weight <= 0.0) throw std::invalid_argument("ensemble has no weight");
  for (auto& [k, v] : total.raw) v /= weight;
  total.extraction /= weight;
  SagnacResult s = finish(std::move(total));
  s.herald_probability = 1.0;
  return s;
}

namespace {

HeraldResult forward(const ChipParams& chip, int n) {
  HeraldResult h = heralded_output(chip, chip_pair_input(n), chip_herald());
  if (!h.heralded) throw NumericError("forward pass never heralds for these parameters");
  return h;
}

}  // namespace

SagnacResult sagnac_scenario(const ChipParams& chip, int n) {
  const HeraldResult h = forward(chip, n);
  SagnacResult s = sagnac_reverse(h.conditional_state, chip);
  s.herald_probability = h.probability;
  return s;
}

SagnacResult sagnac_scenario_dephased(const ChipParams& chip, int n) {
  const HeraldResult h = forward(chip, n);
  SagnacResult s = sagnac_reverse(dephase(h.conditional_state), chip);
  s.forward_state = h.conditional_state;
  s.herald_probability = h.probability;
  return s;
}

}  // namespace heraldsim
