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

#include "heraldsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace heraldsim {

Occupation::Occupation(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("occupation counts must be non-negative");
  }
}

Occupation::Occupation(std::initializer_list<int> counts)
    : Occupation(std::vector<int>(counts)) {}

Occupation Occupation::vacuum(std::size_t modes) {
  return Occupation(std::vector<int>(modes, 0));
}

int Occupation::total() const {
  int n = 0;
  for (int c : counts_) n += c;
  return n;
}

Occupation Occupation::with_added(std::size_t mode, int delta) const {
  if (mode >= counts_.size()) throw std::out_of_range("mode index out of range");
  std::vector<int> c = counts_;
  c[mode] += delta;
  return Occupation(std::move(c));
}

Occupation Occupation::select(std::span<const std::size_t> modes) const {
  std::vector<int> c;
  c.reserve(modes.size());
  for (std::size_t m : modes) {
    if (m >= counts_.size()) throw std::out_of_range("mode index out of range");
    c.push_back(counts_[m]);
  }
  return Occupation(std::move(c));
}

Occupation Occupation::concat(const Occupation& other) const {
  std::vector<int> c = counts_;
  c.insert(c.end(), other.counts_.begin(), other.counts_.end());
  return Occupation(std::move(c));
}

std::string Occupation::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (k) s += ':';
    s += std::to_string(counts_[k]);
  }
  return s;
}

Occupation Occupation::parse(const std::string& text) {
  std::vector<int> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad occupation '" + text + "'");
    }
    if (used != item.size()) throw std::invalid_argument("bad occupation '" + text + "'");
    c.push_back(v);
  }
  return Occupation(std::move(c));
}

namespace {

void enumerate_into(int remaining, std::size_t mode, std::vector<int>& cur,
                    std::vector<Occupation>& out) {
  if (mode + 1 == cur.size()) {
    cur[mode] = remaining;
    out.emplace_back(cur);
    return;
  }
  // Lexicographic order: smallest count in the leading mode first.
  for (int c = 0; c <= remaining; ++c) {
    cur[mode] = c;
    enumerate_into(remaining - c, mode + 1, cur, out);
  }
}

}  // namespace

std::vector<Occupation> enumerate_basis(int photons, std::size_t modes) {
  if (photons < 0) throw std::invalid_argument("photon number must be non-negative");
  std::vector<Occupation> out;
  if (modes == 0) {
    if (photons == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  std::vector<int> cur(modes, 0);
  enumerate_into(photons, 0, cur, out);
  return out;
}

std::size_t basis_dimension(int photons, std::size_t modes) {
  if (modes == 0) return photons == 0 ? 1 : 0;
  // C(n + m - 1, n) computed incrementally; exact for the sizes used here.
  std::size_t r = 1;
  for (int k = 1; k <= photons; ++k) {
    r = r * (modes - 1 + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
  }
  return r;
}

FockState::FockState(std::size_t modes, Terms terms, double prune_eps) : modes_(modes) {
  for (auto& [occ, amp] : terms) {
    if (occ.modes() != modes) throw std::invalid_argument("occupation length differs from mode count");
    if (std::abs(amp) > prune_eps) terms_.emplace(occ, amp);
  }
}

FockState FockState::basis(const Occupation& occ) {
  return FockState(occ.modes(), {{occ, cplx(1.0, 0.0)}});
}

FockState FockState::vacuum(std::size_t modes) { return basis(Occupation::vacuum(modes)); }

cplx FockState::amplitude(const Occupation& occ) const {
  auto it = terms_.find(occ);
  return it == terms_.end() ? cplx{} : it->second;
}

double FockState::squared_norm() const {
  double s = 0.0;
  for (const auto& [occ, amp] : terms_) s += std::norm(amp);
  return s;
}

double FockState::norm() const { return std::sqrt(squared_norm()); }

FockState FockState::normalized() const {
  double n = norm();
  if (n == 0.0) return *this;
  return scaled(1.0 / n);
}

FockState FockState::scaled(cplx factor) const {
  Terms t;
  for (const auto& [occ, amp] : terms_) t.emplace(occ, amp * factor);
  return FockState(modes_, std::move(t));
}

FockState FockState::plus(const FockState& other) const {
  if (other.modes_ != modes_) throw std::invalid_argument("mode count mismatch");
  Terms t = terms_;
  for (const auto& [occ, amp] : other.terms_) t[occ] += amp;
  return FockState(modes_, std::move(t));
}

std::vector<int> FockState::photon_numbers() const {
  std::set<int> ns;
  for (const auto& [occ, amp] : terms_) ns.insert(occ.total());
  return {ns.begin(), ns.end()};
}

FockState FockState::sector(int photons) const {
  Terms t;
  for (const auto& [occ, amp] : terms_) {
    if (occ.total() == photons) t.emplace(occ, amp);
  }
  return FockState(modes_, std::move(t));
}

FockState FockState::permute_modes(std::span<const std::size_t> order) const {
  if (order.size() != modes_) throw std::invalid_argument("permutation length differs from mode count");
  std::vector<bool> seen(modes_, false);
  for (std::size_t m : order) {
    if (m >= modes_ || seen[m]) throw std::invalid_argument("not a permutation of the modes");
    seen[m] = true;
  }
  Terms t;
  for (const auto& [occ, amp] : terms_) t.emplace(occ.select(order), amp);
  return FockState(modes_, std::move(t));
}

FockState make_noon(const NoonSpec& spec, std::size_t modes) {
  if (spec.n < 0 || spec.m < 0) throw std::invalid_argument("photon numbers must be non-negative");
  if (spec.n < spec.m) throw std::invalid_argument("NOON spec requires n >= m");
  const auto [x, y] = spec.mode_pair;
  if (modes < 2 || x >= modes || y >= modes || x == y) {
    throw std::invalid_argument("NOON mode pair must be two distinct modes in range");
  }
  Occupation first = Occupation::vacuum(modes).with_added(x, spec.n).with_added(y, spec.m);
  if (spec.n == spec.m) return FockState::basis(first);
  Occupation second = Occupation::vacuum(modes).with_added(x, spec.m).with_added(y, spec.n);
  const double s = std::numbers::sqrt2 / 2.0;
  return FockState(modes, {{first, cplx(s, 0.0)}, {second, std::polar(s, spec.alpha)}});
}

FockState tensor(const FockState& a, const FockState& b) {
  FockState::Terms t;
  for (const auto& [oa, ca] : a.terms()) {
    for (const auto& [ob, cb] : b.terms()) t.emplace(oa.concat(ob), ca * cb);
  }
  return FockState(a.modes() + b.modes(), std::move(t));
}

cplx inner_product(const FockState& a, const FockState& b) {
  if (a.modes() != b.modes()) throw std::invalid_argument("inner product of states with different mode counts");
  cplx s{};
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [occ, amp] : small.terms()) {
    cplx other = large.amplitude(occ);
    if (other == cplx{}) continue;
    s += (&small == &a) ? std::conj(amp) * other : std::conj(other) * amp;
  }
  return s;
}

double overlap_fidelity(const FockState& a, const FockState& b) {
  double na = a.squared_norm();
  double nb = b.squared_norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::norm(inner_product(a, b)) / (na * nb);
}

Distribution marginal_distribution(const FockState& state, std::span<const std::size_t> modes) {
  for (std::size_t m : modes) {
    if (m >= state.modes()) throw std::out_of_range("marginal mode index out of range");
  }
  Distribution d;
  for (const auto& [occ, amp] : state.terms()) d[occ.select(modes)] += std::norm(amp);
  return d;
}

Distribution full_distribution(const FockState& state) {
  Distribution d;
  for (const auto& [occ, amp] : state.terms()) d[occ] = std::norm(amp);
  return d;
}

Distribution ensemble_distribution(const Ensemble& ensemble, std::span<const std::size_t> modes) {
  Distribution d;
  for (const auto& member : ensemble) {
    for (const auto& [occ, p] : marginal_distribution(member.state, modes)) d[occ] += member.weight * p;
  }
  return d;
}

Ensemble dephase(const FockState& state) {
  Ensemble e;
  for (const auto& [occ, amp] : state.terms()) e.push_back({std::norm(amp), FockState::basis(occ)});
  return e;
}

nlohmann::json to_json(const FockState& state) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [occ, amp] : state.terms()) {
    terms.push_back({{"occ", occ.counts()}, {"re", amp.real()}, {"im", amp.imag()}});
  }
  return {{"modes", state.modes()}, {"terms", std::move(terms)}};
}

FockState state_from_json(const nlohmann::json& j) {
  const auto modes = j.at("modes").get<std::size_t>();
  FockState::Terms t;
  for (const auto& term : j.at("terms")) {
    Occupation occ(term.at("occ").get<std::vector<int>>());
    if (occ.modes() != modes) throw std::invalid_argument("term occupation length differs from \"modes\"");
    t[occ] += cplx(term.value("re", 0.0), term.value("im", 0.0));
  }
  return FockState(modes, std::move(t));
}

}  // namespace heraldsim
