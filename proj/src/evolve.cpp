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

#include "heraldsim/evolve.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "heraldsim/circuit.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/permanent.hpp"

namespace heraldsim {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

double factorial_product(const Occupation& occ) {
  double r = 1.0;
  for (int c : occ.counts()) r *= factorial(c);
  return r;
}

void check_photons(const FockState& state) {
  for (const auto& [occ, amp] : state.terms()) {
    if (occ.total() > kMaxPhotons) {
      throw std::invalid_argument("term with " + std::to_string(occ.total()) + " photons exceeds the cap of " +
                                  std::to_string(kMaxPhotons));
    }
  }
}

using Poly = std::map<std::vector<int>, cplx>;

// prod_k (sum_j U_jk x_j)^{s_k} as a polynomial in x.
Poly expand_creation_product(const Matrix& u, const Occupation& input) {
  const std::size_t m = input.modes();
  Poly poly{{std::vector<int>(m, 0), cplx(1.0, 0.0)}};
  for (std::size_t k = 0; k < m; ++k) {
    for (int rep = 0; rep < input[k]; ++rep) {
      Poly next;
      for (const auto& [mono, coeff] : poly) {
        for (std::size_t j = 0; j < m; ++j) {
          const cplx ujk = u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
          if (ujk == cplx{}) continue;
          std::vector<int> e = mono;
          ++e[j];
          next[std::move(e)] += coeff * ujk;
        }
      }
      poly = std::move(next);
    }
  }
  return poly;
}

}  // namespace

void check_evolution_matrix(const Matrix& u, std::size_t modes) {
  if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != modes) {
    throw std::invalid_argument("matrix dimension does not match the state's mode count");
  }
  const double defect = unitarity_defect(u);
  if (!(defect <= kUnitarityTolerance)) {
    throw NumericError("evolution matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
}

FockState evolve(const Matrix& u, const FockState& state) {
  check_evolution_matrix(u, state.modes());
  check_photons(state);
  FockState::Terms out;
  for (const auto& [input, amp] : state.terms()) {
    const double in_norm = std::sqrt(factorial_product(input));
    for (const auto& [mono, coeff] : expand_creation_product(u, input)) {
      Occupation occ(mono);
      out[occ] += amp * coeff * std::sqrt(factorial_product(occ)) / in_norm;
    }
  }
  return FockState(state.modes(), std::move(out));
}

cplx transition_amplitude(const TransitionQuery& q) {
  const auto& u = q.matrix;
  if (q.input.modes() != static_cast<std::size_t>(u.cols()) || q.output.modes() != static_cast<std::size_t>(u.rows())) {
    throw std::invalid_argument("occupation length does not match the matrix");
  }
  const int n = q.input.total();
  if (n != q.output.total()) return {};
  if (n > kMaxPhotons) throw std::invalid_argument("photon number exceeds the cap");
  std::vector<Eigen::Index> rows, cols;
  for (std::size_t j = 0; j < q.output.modes(); ++j) rows.insert(rows.end(), q.output[j], static_cast<Eigen::Index>(j));
  for (std::size_t k = 0; k < q.input.modes(); ++k) cols.insert(cols.end(), q.input[k], static_cast<Eigen::Index>(k));
  Matrix sub(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) sub(r, c) = u(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
  }
  return permanent(sub) / std::sqrt(factorial_product(q.input) * factorial_product(q.output));
}

cplx transition_amplitude(const Matrix& u, const Occupation& input, const Occupation& output) {
  return transition_amplitude(TransitionQuery{u, input, output});
}

FockState evolve_by_permanents(const Matrix& u, const FockState& state) {
  check_evolution_matrix(u, state.modes());
  check_photons(state);
  FockState::Terms out;
  std::map<int, std::vector<Occupation>> bases;
  for (const auto& [input, amp] : state.terms()) {
    const int n = input.total();
    auto it = bases.find(n);
    if (it == bases.end()) it = bases.emplace(n, enumerate_basis(n, state.modes())).first;
    for (const auto& output : it->second) out[output] += amp * transition_amplitude(u, input, output);
  }
  return FockState(state.modes(), std::move(out));
}

Distribution output_distribution(const Matrix& u, const Occupation& input) {
  check_evolution_matrix(u, input.modes());
  Distribution d;
  for (const auto& output : enumerate_basis(input.total(), input.modes())) {
    const double p = std::norm(transition_amplitude(u, input, output));
    if (p > 0.0) d.emplace(output, p);
  }
  return d;
}

DiscreteSampler::DiscreteSampler(const Distribution& dist) {
  double acc = 0.0;
  for (const auto& [occ, p] : dist) {
    if (p <= 0.0) continue;
    acc += p;
    outcomes_.push_back(occ);
    cumulative_.push_back(acc);
  }
  if (outcomes_.empty()) throw std::invalid_argument("cannot sample from an empty distribution");
}

const Occupation& DiscreteSampler::draw(Rng& rng) const { return outcomes_[rng.pick(cumulative_)]; }

Occupation sample_output(const Matrix& u, const Occupation& input, std::uint64_t seed) {
  DiscreteSampler sampler(output_distribution(u, input));
  Rng rng(seed);
  return sampler.draw(rng);
}

std::vector<Occupation> sample_outputs(const Matrix& u, const Occupation& input, std::size_t shots,
                                       std::uint64_t seed, std::size_t workers) {
  const DiscreteSampler sampler(output_distribution(u, input));
  return run_streams<Occupation>(shots, seed, workers, [&](Rng& rng) { return sampler.draw(rng); });
}

std::vector<Occupation> sample_state(const FockState& state, std::size_t shots, std::uint64_t seed,
                                     std::size_t workers) {
  const DiscreteSampler sampler(full_distribution(state));
  return run_streams<Occupation>(shots, seed, workers, [&](Rng& rng) { return sampler.draw(rng); });
}

Distribution empirical_distribution(const std::vector<Occupation>& samples) {
  std::map<Occupation, std::size_t> counts;
  for (const auto& s : samples) ++counts[s];
  Distribution d;
  for (const auto& [occ, c] : counts) d[occ] = static_cast<double>(c) / static_cast<double>(samples.size());
  return d;
}

}  // namespace heraldsim
