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

#include "heraldsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "heraldsim/analysis.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/evolve.hpp"

namespace heraldsim {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& ref) {
  std::filesystem::path p(ref);
  return p.is_absolute() || base.empty() ? p : base / p;
}

json chip_to_json(const ChipParams& c) {
  return {{"eta1", c.eta1}, {"eta2", c.eta2}, {"eta3", c.eta3}, {"eta4", c.eta4}, {"phi", c.phi}};
}

ChipParams chip_from_json(const json& j) {
  check_keys(j, {"eta1", "eta2", "eta3", "eta4", "phi"}, "chip");
  ChipParams c;
  c.eta1 = j.value("eta1", c.eta1);
  c.eta2 = j.value("eta2", c.eta2);
  c.eta3 = j.value("eta3", c.eta3);
  c.eta4 = j.value("eta4", c.eta4);
  c.phi = j.value("phi", c.phi);
  return c;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

json spdc_to_json(const SpdcParams& p) { return {{"xi", p.xi}, {"n_max", p.n_max}, {"overlap", p.overlap}}; }

SpdcParams spdc_from_json(const json& j) {
  check_keys(j, {"xi", "n_max", "overlap"}, "spdc");
  SpdcParams p;
  p.xi = j.value("xi", p.xi);
  p.n_max = j.value("n_max", p.n_max);
  p.overlap = j.value("overlap", p.overlap);
  return p;
}

json distribution_to_json(const Distribution& d) {
  json out = json::object();
  for (const auto& [occ, p] : d) out[occ.to_string()] = p;
  return out;
}

Distribution distribution_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("distribution must map outcomes to probabilities");
  Distribution d;
  for (const auto& [key, value] : j.items()) d[Occupation::parse(key)] = value.get<double>();
  return d;
}

const std::map<std::string, std::size_t>& labels_for(const ScenarioConfig& c, std::map<std::string, std::size_t>& chip) {
  if (c.circuit) return c.circuit->labels;
  chip = chip_circuit(c.chip).labels;
  return chip;
}

std::size_t resolve_mode(const std::string& key, const ScenarioConfig& c) {
  if (!key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char ch) { return std::isdigit(ch); }))
    return std::stoul(key);
  std::map<std::string, std::size_t> scratch;
  const auto& labels = labels_for(c, scratch);
  auto it = labels.find(key);
  if (it == labels.end() || c.matrix) throw ConfigError("unknown mode label '" + key + "'");
  return it->second;
}

void write_text(const RunOptions& options, const std::string& name, const std::string& content) {
  if (options.out_dir.empty()) return;
  std::filesystem::create_directories(options.out_dir);
  std::ofstream out(options.out_dir / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (options.out_dir / name).string());
  out << content;
}

void write_json(const RunOptions& options, const std::string& name, const json& j) {
  write_text(options, name, j.dump(2) + "\n");
}

void write_distribution(const RunOptions& options, const std::string& stem, const Distribution& d) {
  if (options.format == OutputFormat::json) {
    write_json(options, stem + ".json", distribution_to_json(d));
  } else {
    std::ostringstream ss;
    write_distribution_csv(ss, d);
    write_text(options, stem + ".csv", ss.str());
  }
}

Matrix scenario_matrix(const ScenarioConfig& c) {
  if (c.matrix) return *c.matrix;
  if (c.circuit) return compile(*c.circuit);
  return compile(chip_circuit(c.chip));
}

}  // namespace

void ScenarioConfig::validate() const {
  if (state && spdc) throw ConfigError("give exactly one input source: state or spdc");
  if (matrix && circuit) throw ConfigError("give at most one of matrix and circuit");
  if (exact_pattern && click_pattern) throw ConfigError("give at most one detection pattern");
  try {
    if (circuit) circuit->validate();
    if (spdc) spdc->validate();
    if (!topology.trees.empty()) topology.validate();
    coincidence.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (matrix && matrix->rows() != matrix->cols()) throw ConfigError("matrix must be square");
  const std::size_t modes = mode_count();
  if (state && state->modes() != modes)
    throw ConfigError("input state has " + std::to_string(state->modes()) + " modes, circuit has " +
                      std::to_string(modes));
  if (spdc && (matrix || circuit)) throw ConfigError("spdc input drives the chip only");
  for (const auto& [mode, count] : herald.requirements) {
    if (mode >= modes) throw ConfigError("herald mode out of range");
    if (count < 0) throw ConfigError("herald counts must be non-negative");
  }
  if (exact_pattern && exact_pattern->modes() != modes) throw ConfigError("exact pattern must cover every mode");
  if (sweep) {
    if (sweep->parameter != "phi") throw ConfigError("only phi sweeps are supported");
    if (sweep->grid.empty()) throw ConfigError("sweep grid is empty");
  }
  if (target_sector < 1) throw ConfigError("target_sector must be at least 1");
}

std::size_t ScenarioConfig::mode_count() const {
  if (matrix) return static_cast<std::size_t>(matrix->rows());
  if (circuit) return circuit->mode_count;
  return 4;
}

FockState ScenarioConfig::input_state() const {
  if (state) return *state;
  if (spdc) return chip_spdc_input(*spdc);
  throw ConfigError("scenario has no input state");
}

ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base) {
  check_keys(j,
             {"name", "chip", "circuit", "circuit_file", "matrix", "input", "herald", "topology", "topology_file",
              "pattern", "sweep", "sagnac", "target_sector", "seed", "shots", "coincidence", "fidelity"},
             "scenario");
  ScenarioConfig c;
  try {
    c.name = j.value("name", "");
    if (j.contains("chip")) c.chip = chip_from_json(j["chip"]);
    if (j.contains("circuit") && j.contains("circuit_file")) throw ConfigError("give circuit or circuit_file, not both");
    if (j.contains("circuit")) c.circuit = circuit_from_json(j["circuit"]);
    if (j.contains("circuit_file")) c.circuit = circuit_from_json(read_json_file(resolve(base, j["circuit_file"])));
    if (j.contains("matrix")) c.matrix = matrix_from_json(j["matrix"]);

    if (j.contains("input")) {
      const json& in = j["input"];
      check_keys(in, {"state", "occupation", "spdc", "file"}, "input");
      if (in.size() != 1) throw ConfigError("input needs exactly one source");
      if (in.contains("state")) c.state = state_from_json(in["state"]);
      if (in.contains("occupation")) c.state = FockState::basis(Occupation::parse(in["occupation"]));
      if (in.contains("file")) c.state = state_from_json(read_json_file(resolve(base, in["file"])));
      if (in.contains("spdc")) c.spdc = spdc_from_json(in["spdc"]);
    }

    if (j.contains("herald")) {
      if (!j["herald"].is_object()) throw ConfigError("herald must map modes to photon counts");
      for (const auto& [key, value] : j["herald"].items()) c.herald.requirements[resolve_mode(key, c)] = value.get<int>();
    }

    if (j.contains("topology") && j.contains("topology_file")) throw ConfigError("give topology or topology_file, not both");
    if (j.contains("topology")) {
      const json& t = j["topology"];
      c.topology = t.is_string() ? topology_preset(t.get<std::string>()) : topology_from_json(t);
    }
    if (j.contains("topology_file")) c.topology = topology_from_json(read_json_file(resolve(base, j["topology_file"])));

    if (j.contains("pattern")) {
      const json& p = j["pattern"];
      check_keys(p, {"exact", "clicks"}, "pattern");
      if (p.size() != 1) throw ConfigError("pattern needs exactly one of exact or clicks");
      if (p.contains("exact")) c.exact_pattern = Occupation::parse(p["exact"]);
      if (p.contains("clicks")) c.click_pattern = parse_click_pattern(p["clicks"]);
    }

    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      check_keys(s, {"parameter", "grid", "start", "stop", "points"}, "sweep");
      SweepSpec sweep;
      sweep.parameter = s.value("parameter", "phi");
      if (s.contains("grid")) {
        if (s.contains("points")) throw ConfigError("sweep takes grid or start/stop/points, not both");
        sweep.grid = s["grid"].get<std::vector<double>>();
      } else {
        const double start = s.value("start", 0.0);
        const double stop = s.value("stop", 2.0 * std::numbers::pi);
        const int points = s.value("points", 0);
        if (points < 1) throw ConfigError("sweep needs a positive point count");
        sweep.grid = phase_grid(start, stop, static_cast<std::size_t>(points));
      }
      c.sweep = sweep;
    }

    c.sagnac = j.value("sagnac", false);
    c.target_sector = j.value("target_sector", 3);
    c.seed = j.value("seed", std::uint64_t{1});
    c.shots = j.value("shots", std::size_t{0});

    if (j.contains("coincidence")) {
      const json& k = j["coincidence"];
      check_keys(k,
                 {"t_clk", "window_cycles", "n_channels", "jitter_sigma", "dead_time", "pulses", "pulses_file",
                  "synthetic"},
                 "coincidence");
      auto& cc = c.coincidence;
      cc.t_clk = k.value("t_clk", cc.t_clk);
      cc.window_cycles = k.value("window_cycles", cc.window_cycles);
      cc.n_channels = k.value("n_channels", cc.n_channels);
      cc.jitter_sigma = k.value("jitter_sigma", cc.jitter_sigma);
      cc.dead_time = k.value("dead_time", cc.dead_time);
      if (k.contains("pulses") && k.contains("pulses_file")) throw ConfigError("give pulses or pulses_file, not both");
      if (k.contains("pulses")) {
        for (const auto& e : k["pulses"]) c.pulses.push_back({e.at("channel").get<std::string>(), e.at("t").get<double>()});
        std::stable_sort(c.pulses.begin(), c.pulses.end(),
                         [](const PulseEvent& a, const PulseEvent& b) { return a.t < b.t; });
      }
      if (k.contains("pulses_file")) {
        std::ifstream in(resolve(base, k["pulses_file"]));
        if (!in) throw ConfigError("cannot open pulse file " + k["pulses_file"].get<std::string>());
        c.pulses = read_pulse_csv(in);
      }
      if (k.contains("synthetic")) {
        const json& s = k["synthetic"];
        check_keys(s, {"delays", "pairs", "spacing"}, "synthetic");
        SyntheticPulses syn;
        syn.delays = s.at("delays").get<std::vector<double>>();
        syn.pairs = s.value("pairs", syn.pairs);
        syn.spacing = s.value("spacing", syn.spacing);
        c.synthetic = syn;
      }
    }

    if (j.contains("fidelity")) {
      const json& f = j["fidelity"];
      check_keys(f, {"a", "b", "a_file", "b_file"}, "fidelity");
      auto load = [&](const char* inline_key, const char* file_key) {
        if (f.contains(inline_key)) return distribution_from_json(f[inline_key]);
        if (f.contains(file_key)) {
          std::ifstream in(resolve(base, f[file_key]));
          if (!in) throw ConfigError("cannot open " + f[file_key].get<std::string>());
          return read_distribution_csv(in);
        }
        return Distribution{};
      };
      c.dist_a = load("a", "a_file");
      c.dist_b = load("b", "b_file");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad scenario: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

json to_json(const ScenarioConfig& c) {
  json j = json::object();
  j["name"] = c.name;
  j["chip"] = chip_to_json(c.chip);
  if (c.circuit) j["circuit"] = to_json(*c.circuit);
  if (c.matrix) j["matrix"] = matrix_to_json(*c.matrix);
  if (c.state) j["input"] = {{"state", to_json(*c.state)}};
  if (c.spdc) j["input"] = {{"spdc", spdc_to_json(*c.spdc)}};
  json herald = json::object();
  for (const auto& [mode, count] : c.herald.requirements) herald[std::to_string(mode)] = count;
  j["herald"] = herald;
  if (!c.topology.trees.empty()) j["topology"] = to_json(c.topology);
  if (c.exact_pattern) j["pattern"] = {{"exact", c.exact_pattern->to_string()}};
  if (c.click_pattern) j["pattern"] = {{"clicks", to_string(*c.click_pattern)}};
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"grid", c.sweep->grid}};
  j["sagnac"] = c.sagnac;
  j["target_sector"] = c.target_sector;
  j["seed"] = c.seed;
  j["shots"] = c.shots;
  json cc = {{"t_clk", c.coincidence.t_clk},
             {"window_cycles", c.coincidence.window_cycles},
             {"n_channels", c.coincidence.n_channels},
             {"jitter_sigma", c.coincidence.jitter_sigma},
             {"dead_time", c.coincidence.dead_time}};
  if (!c.pulses.empty()) {
    json pulses = json::array();
    for (const auto& e : c.pulses) pulses.push_back({{"channel", e.channel}, {"t", e.t}});
    cc["pulses"] = pulses;
  }
  if (c.synthetic)
    cc["synthetic"] = {{"delays", c.synthetic->delays}, {"pairs", c.synthetic->pairs}, {"spacing", c.synthetic->spacing}};
  j["coincidence"] = cc;
  if (!c.dist_a.empty() || !c.dist_b.empty())
    j["fidelity"] = {{"a", distribution_to_json(c.dist_a)}, {"b", distribution_to_json(c.dist_b)}};
  return j;
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b-sagnac", "fig3a", "fig3b", "fig3b-sampled", "fig4", "contamination", "coincidence-sweep", "hom"};
}

ScenarioConfig preset(const std::string& name) {
  constexpr double pi = std::numbers::pi;
  ScenarioConfig c;
  c.name = name;
  if (name == "fig2a" || name == "fig2b-sagnac") {
    c.state = chip_pair_input(2);
    c.herald = chip_herald();
    c.sagnac = name == "fig2b-sagnac";
  } else if (name == "fig3a") {
    c.state = FockState::basis(Occupation{0, 1, 0, 0});
    c.exact_pattern = Occupation{0, 1, 0, 0};
    c.sweep = SweepSpec{"phi", phase_grid(0.0, 2.0 * pi, 256)};
  } else if (name == "fig3b" || name == "fig3b-sampled") {
    c.state = chip_pair_input(3);
    c.exact_pattern = Occupation{1, 4, 0, 1};
    c.sweep = SweepSpec{"phi", name == "fig3b" ? phase_grid(0.0, 2.0 * pi, 256)
                                               : std::vector<double>{pi / 2, pi, 3 * pi / 2, 2 * pi}};
  } else if (name == "fig4") {
    c.state = chip_pair_input(3);
    c.herald = chip_herald();
    c.chip.phi = pi / 2;
  } else if (name == "contamination") {
    c.spdc = SpdcParams{};
    c.herald = chip_herald();
    c.chip.phi = pi / 2;
    c.topology = tree_4x4_topology();
  } else if (name == "coincidence-sweep") {
    SyntheticPulses syn;
    for (int k = 0; k <= 24; ++k) syn.delays.push_back(0.5 * k);
    c.synthetic = syn;
  } else if (name == "hom") {
    c.matrix = Matrix(dc_matrix(0.5));
    c.state = FockState::basis(Occupation{2, 2});
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

Distribution read_distribution_csv(std::istream& in) {
  Distribution d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("outcome", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("distribution CSV line " + std::to_string(lineno) + ": expected 'outcome,probability'");
    try {
      d[Occupation::parse(line.substr(0, comma))] += std::stod(line.substr(comma + 1));
    } catch (const std::exception& e) {
      throw ConfigError("distribution CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return d;
}

void write_distribution_csv(std::ostream& out, const Distribution& dist) {
  out << "outcome,probability\n";
  for (const auto& [occ, p] : dist) out << occ.to_string() << ',' << format_double(p) << '\n';
}

json cmd_simulate(const ScenarioConfig& c, const RunOptions& options) {
  c.validate();
  const Matrix u = scenario_matrix(c);
  check_evolution_matrix(u, c.mode_count());
  const FockState input = c.input_state();
  const FockState output = evolve(u, input);

  json report = {{"name", c.name}, {"command", "simulate"}, {"input", to_json(input)}, {"output", to_json(output)}};
  Distribution dist;
  HeraldResult herald;
  if (c.herald.requirements.empty()) {
    dist = full_distribution(output);
  } else {
    herald = project(output, c.herald);
    report["herald"] = to_json(c.chip.phi, herald);
    if (herald.heralded) {
      dist = full_distribution(herald.conditional_state);
    } else {
      report["note"] = "herald pattern has zero probability";
    }
  }
  report["distribution"] = distribution_to_json(dist);

  if (c.shots > 0) {
    const auto samples = sample_state(output.normalized(), c.shots, c.seed);
    std::vector<Occupation> kept;
    std::vector<std::size_t> keep_modes;
    for (std::size_t m = 0; m < output.modes(); ++m)
      if (!c.herald.requirements.contains(m)) keep_modes.push_back(m);
    for (const auto& s : samples)
      if (c.herald.matches(s)) kept.push_back(s.select(keep_modes));
    const Distribution sampled = kept.empty() ? Distribution{} : empirical_distribution(kept);
    report["sampled"] = {{"shots", c.shots},
                         {"seed", c.seed},
                         {"herald_rate", static_cast<double>(kept.size()) / static_cast<double>(c.shots)},
                         {"distribution", distribution_to_json(sampled)}};
    if (!dist.empty() && !sampled.empty()) report["sampled"]["total_variation"] = total_variation(dist, sampled);
  }

  if (c.sagnac) {
    if (c.matrix || c.circuit || !herald.heralded || herald.remaining_modes != std::vector<std::size_t>{1, 2})
      throw ConfigError("sagnac test needs the chip heralded on i and l");
    const SagnacResult pure = sagnac_reverse(herald.conditional_state, c.chip);
    const SagnacResult mixed = sagnac_reverse(dephase(herald.conditional_state), c.chip);
    const Occupation both{1, 1};
    auto p11 = [&](const Distribution& d) {
      auto it = d.find(both);
      return it == d.end() ? 0.0 : it->second;
    };
    report["sagnac"] = {{"extraction_prob", pure.extraction_probability},
                        {"pure", {{"p11", p11(pure.conditioned)}, {"p11_raw", p11(pure.raw)},
                                  {"distribution", distribution_to_json(pure.conditioned)}}},
                        {"dephased", {{"p11", p11(mixed.conditioned)}, {"p11_raw", p11(mixed.raw)},
                                      {"distribution", distribution_to_json(mixed.conditioned)}}}};
  }

  write_json(options, "report.json", report);
  write_distribution(options, "distribution", dist);
  return report;
}

json cmd_fringe(const ScenarioConfig& c, const RunOptions& options) {
  c.validate();
  if (c.matrix || c.circuit) throw ConfigError("fringe scans run on the chip");
  if (!c.state) throw ConfigError("fringe scan needs an explicit input state");
  if (!c.sweep) throw ConfigError("fringe scan needs a sweep");
  FringeScenario s;
  s.chip = c.chip;
  s.input = *c.state;
  s.exact = c.exact_pattern;
  s.clicks = c.click_pattern;
  s.topology = c.topology;
  std::vector<FringeSample> samples;
  try {
    s.validate();
    samples = fringe_scan(s, c.sweep->grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  json report = {{"name", c.name}, {"command", "fringe"}, {"pattern", s.pattern_label()}, {"points", samples.size()}};
  try {
    const FringeFit fit = fringe_period(samples);
    report["has_fringe"] = fit.has_fringe;
    if (fit.has_fringe) {
      report["period"] = fit.period;
      report["period_over_pi"] = fit.period / std::numbers::pi;
    } else {
      report["note"] = "no fringe";
    }
    report["visibility"] = fit.visibility;
  } catch (const InsufficientSamples&) {
    report["note"] = "insufficient for fit";
  }
  json table = json::array();
  for (const auto& f : samples) table.push_back({{"phi", f.phi}, {"probability", f.probability}});
  report["samples"] = table;

  write_json(options, "report.json", report);
  if (options.format == OutputFormat::json) {
    write_json(options, "fringe.json", table);
  } else {
    std::ostringstream ss;
    ss << "phi,probability\n";
    for (const auto& f : samples) ss << format_double(f.phi) << ',' << format_double(f.probability) << '\n';
    write_text(options, "fringe.csv", ss.str());
  }
  return report;
}

json cmd_contamination(const ScenarioConfig& c, const RunOptions& options) {
  c.validate();
  if (!c.spdc) throw ConfigError("contamination needs spdc input parameters");
  if (c.herald.requirements.empty()) throw ConfigError("contamination needs a herald pattern");
  if (c.topology.trees.empty()) throw ConfigError("contamination needs a detection topology");
  ContaminationReport r;
  try {
    r = contamination_report(c.chip, *c.spdc, c.herald, c.topology, c.target_sector);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json report = to_json(r);
  report["name"] = c.name;
  report["command"] = "contamination";
  write_json(options, "contamination.json", report);
  if (options.format == OutputFormat::csv) {
    std::ostringstream ss;
    ss << "sector,weight,herald_prob,event_prob,false_event_prob\n";
    for (const auto& s : r.sectors) {
      ss << s.sector << ',' << format_double(s.weight) << ',' << format_double(s.herald_probability) << ','
         << format_double(s.event_probability) << ',' << format_double(s.false_event_probability) << '\n';
    }
    write_text(options, "contamination.csv", ss.str());
  }
  return report;
}

json cmd_coincidence(const ScenarioConfig& c, const RunOptions& options) {
  c.validate();
  if (c.pulses.empty() && !c.synthetic) throw ConfigError("coincidence needs pulses or a synthetic sweep");
  json report = {{"name", c.name},
                 {"command", "coincidence"},
                 {"t_clk", c.coincidence.t_clk},
                 {"window_cycles", c.coincidence.window_cycles}};
  if (!c.pulses.empty()) {
    const auto counts = count_coincidences(c.pulses, c.coincidence, 0.0, c.seed);
    json cj = json::object();
    for (const auto& [set, n] : counts) {
      std::string key;
      for (const auto& ch : set) key += (key.empty() ? "" : "+") + ch;
      cj[key] = n;
    }
    report["coincidences"] = cj;
    report["singles"] = count_singles(c.pulses, c.coincidence);
    if (options.format == OutputFormat::csv) {
      std::ostringstream ss;
      write_coincidence_csv(ss, counts);
      write_text(options, "coincidences.csv", ss.str());
    }
  }
  if (c.synthetic) {
    json rows = json::array();
    double worst = 0.0;
    std::ostringstream ss;
    ss << "delay_ns,coincidence_fraction,window_profile\n";
    for (std::size_t k = 0; k < c.synthetic->delays.size(); ++k) {
      const double delay = c.synthetic->delays[k];
      std::vector<PulseEvent> stream;
      try {
        stream = synthetic_pair_stream(delay, c.synthetic->pairs, c.synthetic->spacing, c.coincidence.t_clk,
                                       derive_seed(c.seed, k));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      const auto counts = count_coincidences(stream, c.coincidence, 0.0, derive_seed(c.seed, k + 1000003));
      std::uint64_t hits = 0;
      for (const auto& [set, n] : counts) hits += n;
      const double frac = static_cast<double>(hits) / static_cast<double>(c.synthetic->pairs);
      const double ideal = window_profile(delay, c.coincidence);
      worst = std::max(worst, std::abs(frac - ideal));
      rows.push_back({{"delay", delay}, {"fraction", frac}, {"window_profile", ideal}, {"coincidences", hits}});
      ss << format_double(delay) << ',' << format_double(frac) << ',' << format_double(ideal) << '\n';
    }
    report["profile"] = rows;
    report["max_deviation"] = worst;
    if (options.format == OutputFormat::csv) write_text(options, "profile.csv", ss.str());
  }
  write_json(options, "report.json", report);
  return report;
}

json cmd_fidelity(const ScenarioConfig& c, const RunOptions& options) {
  if (c.dist_a.empty() || c.dist_b.empty()) throw ConfigError("fidelity needs two distributions");
  double f = 0.0;
  try {
    f = fidelity(c.dist_a, c.dist_b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json report = {{"command", "fidelity"}, {"fidelity", f}};
  write_json(options, "report.json", report);
  if (options.format == OutputFormat::csv) write_text(options, "fidelity.csv", "fidelity\n" + format_double(f) + "\n");
  return report;
}

}  // namespace heraldsim
