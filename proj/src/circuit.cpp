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

#include "heraldsim/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include "heraldsim/errors.hpp"

namespace heraldsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void check_pair(std::size_t x, std::size_t y, std::size_t modes) {
  if (x >= modes || y >= modes) throw std::invalid_argument("element mode index out of range");
  if (x == y) throw std::invalid_argument("element modes must be distinct");
}

Matrix embed2(const Eigen::Matrix2cd& m, std::size_t x, std::size_t y, std::size_t modes) {
  Matrix u = Matrix::Identity(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(modes));
  const auto ix = static_cast<Eigen::Index>(x);
  const auto iy = static_cast<Eigen::Index>(y);
  u(ix, ix) = m(0, 0);
  u(ix, iy) = m(0, 1);
  u(iy, ix) = m(1, 0);
  u(iy, iy) = m(1, 1);
  return u;
}

}  // namespace

void Interferometer::validate() const {
  for (const auto& el : elements) {
    std::visit(overloaded{
                   [&](const DirectionalCoupler& dc) {
                     check_unit_interval(dc.eta, "coupler reflectivity");
                     check_pair(dc.modes.first, dc.modes.second, mode_count);
                   },
                   [&](const PhaseShifter& ps) {
                     if (!std::isfinite(ps.phi)) throw std::invalid_argument("phase must be finite");
                     if (ps.mode >= mode_count) throw std::invalid_argument("phase shifter mode out of range");
                   },
                   [&](const LossTap& lt) {
                     check_unit_interval(lt.transmission, "loss transmission");
                     check_pair(lt.mode, lt.env_mode, mode_count);
                   },
               },
               el);
  }
  for (const auto& [name, mode] : labels) {
    if (mode >= mode_count) throw std::invalid_argument("label '" + name + "' refers to a mode out of range");
  }
}

bool Interferometer::has_loss() const {
  for (const auto& el : elements) {
    if (std::holds_alternative<LossTap>(el)) return true;
  }
  return false;
}

std::size_t Interferometer::mode_of(const std::string& label) const {
  auto it = labels.find(label);
  if (it == labels.end()) throw std::out_of_range("unknown mode label '" + label + "'");
  return it->second;
}

Eigen::Matrix2cd dc_matrix(double eta) {
  check_unit_interval(eta, "coupler reflectivity");
  const double r = std::sqrt(eta);
  const double t = std::sqrt(1.0 - eta);
  Eigen::Matrix2cd m;
  m << cplx(r, 0.0), cplx(0.0, t), cplx(0.0, t), cplx(r, 0.0);
  return m;
}

Matrix element_matrix(const Element& element, std::size_t modes) {
  return std::visit(overloaded{
                        [&](const DirectionalCoupler& dc) {
                          return embed2(dc_matrix(dc.eta), dc.modes.first, dc.modes.second, modes);
                        },
                        [&](const PhaseShifter& ps) {
                          Matrix u = Matrix::Identity(static_cast<Eigen::Index>(modes),
                                                      static_cast<Eigen::Index>(modes));
                          u(static_cast<Eigen::Index>(ps.mode), static_cast<Eigen::Index>(ps.mode)) =
                              std::polar(1.0, ps.phi);
                          return u;
                        },
                        [&](const LossTap& lt) {
                          return embed2(dc_matrix(lt.transmission), lt.mode, lt.env_mode, modes);
                        },
                    },
                    element);
}

Matrix compile(const Interferometer& circuit) {
  circuit.validate();
  const auto n = static_cast<Eigen::Index>(circuit.mode_count);
  Matrix u = Matrix::Identity(n, n);
  for (const auto& el : circuit.elements) u = element_matrix(el, circuit.mode_count) * u;
  return u;
}

double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

Interferometer chip_circuit(const ChipParams& p) {
  using namespace chip_mode;
  Interferometer c;
  c.mode_count = 4;
  c.elements = {
      DirectionalCoupler{p.eta1, {b, chip_mode::c}},
      PhaseShifter{p.phi, f},
      DirectionalCoupler{p.eta3, {a, e}},
      DirectionalCoupler{p.eta4, {f, d}},
      DirectionalCoupler{p.eta2, {g, h}},
  };
  c.labels = {{"a", a}, {"b", b}, {"c", chip_mode::c}, {"d", d}, {"e", e}, {"f", f}, {"g", g},
              {"h", h}, {"i", i}, {"j", j}, {"k", k}, {"l", l}};
  c.validate();
  return c;
}

Interferometer with_loss(const Interferometer& circuit, std::size_t mode, double transmission) {
  check_unit_interval(transmission, "loss transmission");
  if (mode >= circuit.mode_count) throw std::invalid_argument("loss mode out of range");
  Interferometer out = circuit;
  const std::size_t env = out.mode_count++;
  out.elements.push_back(LossTap{transmission, mode, env});
  return out;
}

nlohmann::json to_json(const Interferometer& circuit) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& el : circuit.elements) {
    std::visit(overloaded{
                   [&](const DirectionalCoupler& dc) {
                     elements.push_back({{"type", "dc"}, {"eta", dc.eta}, {"modes", {dc.modes.first, dc.modes.second}}});
                   },
                   [&](const PhaseShifter& ps) {
                     elements.push_back({{"type", "phase"}, {"phi", ps.phi}, {"mode", ps.mode}});
                   },
                   [&](const LossTap& lt) {
                     elements.push_back({{"type", "loss"}, {"t", lt.transmission}, {"mode", lt.mode}, {"env", lt.env_mode}});
                   },
               },
               el);
  }
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [name, mode] : circuit.labels) labels[name] = mode;
  return {{"modes", circuit.mode_count}, {"labels", labels}, {"elements", elements}};
}

namespace {

std::size_t parse_mode(const nlohmann::json& v, const std::map<std::string, std::size_t>& labels) {
  if (v.is_string()) {
    auto it = labels.find(v.get<std::string>());
    if (it == labels.end()) throw ConfigError("unknown mode label '" + v.get<std::string>() + "'");
    return it->second;
  }
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("mode must be a label or a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

Interferometer circuit_from_json(const nlohmann::json& j) {
  Interferometer c;
  try {
    c.mode_count = j.at("modes").get<std::size_t>();
    if (j.contains("labels")) {
      for (const auto& [name, mode] : j.at("labels").items()) c.labels[name] = mode.get<std::size_t>();
    }
    std::size_t next_env = c.mode_count;
    for (const auto& e : j.at("elements")) {
      const auto type = e.at("type").get<std::string>();
      if (type == "dc") {
        const auto& m = e.at("modes");
        if (!m.is_array() || m.size() != 2) throw ConfigError("dc element needs two modes");
        c.elements.push_back(DirectionalCoupler{e.at("eta").get<double>(), {parse_mode(m[0], c.labels), parse_mode(m[1], c.labels)}});
      } else if (type == "phase") {
        c.elements.push_back(PhaseShifter{e.at("phi").get<double>(), parse_mode(e.at("mode"), c.labels)});
      } else if (type == "loss") {
        const std::size_t mode = parse_mode(e.at("mode"), c.labels);
        const std::size_t env = e.contains("env") ? parse_mode(e.at("env"), c.labels) : next_env++;
        c.elements.push_back(LossTap{e.at("t").get<double>(), mode, env});
      } else {
        throw ConfigError("unknown element type '" + type + "'");
      }
    }
    c.mode_count = std::max(c.mode_count, next_env);
    c.validate();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("circuit JSON: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("circuit JSON: ") + ex.what());
  }
  return c;
}

}  // namespace heraldsim
