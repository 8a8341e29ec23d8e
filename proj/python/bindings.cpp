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

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <map>
#include <string>
#include <vector>

#include "heraldsim/analysis.hpp"
#include "heraldsim/coinc.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/evolve.hpp"
#include "heraldsim/herald.hpp"
#include "heraldsim/permanent.hpp"
#include "heraldsim/scenario.hpp"

namespace py = pybind11;
using namespace heraldsim;

namespace {

using PyState = std::map<std::vector<int>, cplx>;
using PyMatrix = std::vector<std::vector<cplx>>;

Matrix to_matrix(const PyMatrix& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n)
      throw std::invalid_argument("matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

FockState to_state(const PyState& terms) {
  if (terms.empty()) throw std::invalid_argument("state needs at least one term");
  const std::size_t modes = terms.begin()->first.size();
  FockState::Terms t;
  for (const auto& [occ, amp] : terms) {
    if (occ.size() != modes) throw std::invalid_argument("all kets must have the same number of modes");
    t[Occupation(occ)] += amp;
  }
  return FockState(modes, std::move(t));
}

// Keys are tuples so results can be indexed like dist[(2, 0)].
py::dict from_state(const FockState& s) {
  py::dict out;
  for (const auto& [occ, amp] : s.terms()) out[py::tuple(py::cast(occ.counts()))] = amp;
  return out;
}

py::dict from_distribution(const Distribution& d) {
  py::dict out;
  for (const auto& [occ, p] : d) out[py::tuple(py::cast(occ.counts()))] = p;
  return out;
}

ChipParams chip(double eta1, double eta2, double eta3, double eta4, double phi) {
  return {eta1, eta2, eta3, eta4, phi};
}

py::dict run(const std::string& command, const ScenarioConfig& cfg, const std::string& out_dir) {
  RunOptions opt;
  opt.out_dir = out_dir;
  nlohmann::json report;
  if (command == "simulate") report = cmd_simulate(cfg, opt);
  else if (command == "fringe") report = cmd_fringe(cfg, opt);
  else if (command == "contamination") report = cmd_contamination(cfg, opt);
  else if (command == "coincidence") report = cmd_coincidence(cfg, opt);
  else if (command == "fidelity") report = cmd_fidelity(cfg, opt);
  else throw ConfigError("unknown command: " + command);
  return py::module_::import("json").attr("loads")(report.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fock-space simulation of heralded multiphoton interferometers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("permanent", [](const PyMatrix& a) { return permanent(to_matrix(a)); }, py::arg("matrix"));

  m.def("dc_matrix", [](double eta) {
    const Matrix u = dc_matrix(eta);
    return PyMatrix{{u(0, 0), u(0, 1)}, {u(1, 0), u(1, 1)}};
  }, py::arg("eta"));

  m.def("chip_matrix", [](double eta1, double eta2, double eta3, double eta4, double phi) {
    const Matrix u = compile(chip_circuit(chip(eta1, eta2, eta3, eta4, phi)));
    PyMatrix out(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index r = 0; r < u.rows(); ++r)
      for (Eigen::Index c = 0; c < u.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(u(r, c));
    return out;
  }, py::arg("eta1") = 0.5, py::arg("eta2") = 0.5, py::arg("eta3") = 1.0 / 3.0, py::arg("eta4") = 1.0 / 3.0,
     py::arg("phi") = 0.0);

  m.def("evolve", [](const PyMatrix& u, const PyState& state, const std::string& engine) {
    const Matrix mu = to_matrix(u);
    const FockState s = to_state(state);
    if (engine == "expansion") return from_state(evolve(mu, s));
    if (engine == "permanent") return from_state(evolve_by_permanents(mu, s));
    throw std::invalid_argument("engine must be 'expansion' or 'permanent'");
  }, py::arg("matrix"), py::arg("state"), py::arg("engine") = "expansion");

  m.def("transition_amplitude", [](const PyMatrix& u, const std::vector<int>& in, const std::vector<int>& out) {
    return transition_amplitude(to_matrix(u), Occupation(in), Occupation(out));
  }, py::arg("matrix"), py::arg("input"), py::arg("output"));

  m.def("output_distribution", [](const PyMatrix& u, const std::vector<int>& in) {
    return from_distribution(output_distribution(to_matrix(u), Occupation(in)));
  }, py::arg("matrix"), py::arg("input"));

  m.def("herald", [](int n, double eta1, double eta2, double eta3, double eta4, double phi) {
    const HeraldResult h = heralded_output(chip(eta1, eta2, eta3, eta4, phi), chip_pair_input(n), chip_herald());
    py::dict d;
    d["probability"] = h.probability;
    d["heralded"] = h.heralded;
    d["state"] = from_state(h.conditional_state);
    d["remaining_modes"] = h.remaining_modes;
    return d;
  }, py::arg("n"), py::arg("eta1") = 0.5, py::arg("eta2") = 0.5, py::arg("eta3") = 1.0 / 3.0,
     py::arg("eta4") = 1.0 / 3.0, py::arg("phi") = 0.0);

  m.def("noon", [](int n, int mm, double alpha) { return from_state(make_noon({n, mm, alpha, {0, 1}})); },
        py::arg("n"), py::arg("m"), py::arg("alpha") = 0.0);

  m.def("fringe_period", [](const std::vector<double>& phi, const std::vector<double>& p) {
    if (phi.size() != p.size()) throw std::invalid_argument("phi and probability must have equal length");
    std::vector<FringeSample> s;
    for (std::size_t k = 0; k < phi.size(); ++k) s.push_back({phi[k], p[k], ""});
    const FringeFit f = fringe_period(s);
    py::dict d;
    d["has_fringe"] = f.has_fringe;
    d["period"] = f.period;
    d["visibility"] = f.visibility;
    return d;
  }, py::arg("phi"), py::arg("probability"));

  m.def("window_profile", [](double delay, double t_clk, int window_cycles) {
    CoincidenceConfig cfg;
    cfg.t_clk = t_clk;
    cfg.window_cycles = window_cycles;
    return window_profile(delay, cfg);
  }, py::arg("delay"), py::arg("t_clk") = 2.9, py::arg("window_cycles") = 3);

  m.def("preset_names", &preset_names);

  m.def("run_preset", [](const std::string& command, const std::string& name, const std::string& out_dir) {
    return run(command, preset(name), out_dir);
  }, py::arg("command"), py::arg("preset"), py::arg("out_dir") = "");

  m.def("run_config", [](const std::string& command, const std::string& path, const std::string& out_dir) {
    return run(command, load_scenario(path), out_dir);
  }, py::arg("command"), py::arg("config"), py::arg("out_dir") = "");
}
