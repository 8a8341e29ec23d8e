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

#include "heraldsim/coinc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "heraldsim/errors.hpp"
#include "heraldsim/rng.hpp"

namespace heraldsim {

void CoincidenceConfig::validate() const {
  if (!(t_clk > 0.0)) throw std::invalid_argument("clock period must be positive");
  if (window_cycles < 1) throw std::invalid_argument("window must span at least one clock cycle");
  if (n_channels < 1) throw std::invalid_argument("need at least one channel");
  if (!(jitter_sigma >= 0.0)) throw std::invalid_argument("jitter sigma must be non-negative");
  if (!(dead_time >= 0.0)) throw std::invalid_argument("dead time must be non-negative");
}

std::vector<SyncedEvent> synchronize(const std::vector<PulseEvent>& events, double t_clk, double clock_phase) {
  if (!(t_clk > 0.0)) throw std::invalid_argument("clock period must be positive");
  if (!(clock_phase >= 0.0 && clock_phase < t_clk)) throw std::invalid_argument("clock phase must lie in [0, t_clk)");
  std::vector<SyncedEvent> out;
  out.reserve(events.size());
  double prev = -INFINITY;
  for (const auto& e : events) {
    if (e.t < 0.0) throw std::invalid_argument("pulse times must be non-negative");
    if (e.t < prev) throw std::invalid_argument("pulses must be time-sorted");
    prev = e.t;
    const double x = (e.t - clock_phase) / t_clk;
    auto tick = static_cast<std::int64_t>(std::ceil(x));
    // A pulse within rounding of a tick belongs to that tick.
    if (std::abs(x - std::round(x)) < 1e-9) tick = static_cast<std::int64_t>(std::round(x));
    out.push_back({e.channel, tick, clock_phase + static_cast<double>(tick) * t_clk, e.t});
  }
  return out;
}

std::vector<PulseEvent> apply_dead_time(const std::vector<PulseEvent>& events, double dead_time) {
  std::map<std::string, double> last;
  std::vector<PulseEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    auto it = last.find(e.channel);
    if (it != last.end() && e.t - it->second < dead_time) continue;
    last[e.channel] = e.t;
    out.push_back(e);
  }
  return out;
}

std::vector<PulseEvent> apply_jitter(const std::vector<PulseEvent>& events, double sigma, std::uint64_t seed) {
  if (sigma <= 0.0) return events;
  Rng rng(seed);
  std::vector<PulseEvent> out = events;
  for (auto& e : out) e.t = std::max(0.0, rng.normal(e.t, sigma));
  std::stable_sort(out.begin(), out.end(), [](const PulseEvent& a, const PulseEvent& b) { return a.t < b.t; });
  return out;
}

CoincidenceCounts count_coincidences(const std::vector<PulseEvent>& events, const CoincidenceConfig& config,
                                     double clock_phase, std::uint64_t jitter_seed) {
  config.validate();
  const auto filtered = apply_dead_time(apply_jitter(events, config.jitter_sigma, jitter_seed), config.dead_time);
  const auto synced = synchronize(filtered, config.t_clk, clock_phase);
  CoincidenceCounts counts;
  std::size_t start = 0;
  while (start < synced.size()) {
    const std::int64_t open = synced[start].tick;
    ChannelSet channels;
    std::size_t end = start;
    while (end < synced.size() && synced[end].tick - open < config.window_cycles) {
      channels.insert(synced[end].channel);
      ++end;
    }
    if (channels.size() >= 2) ++counts[channels];
    start = end;
  }
  return counts;
}

std::map<std::string, std::uint64_t> count_singles(const std::vector<PulseEvent>& events, const CoincidenceConfig& config) {
  config.validate();
  std::map<std::string, std::uint64_t> singles;
  for (const auto& e : apply_dead_time(events, config.dead_time)) ++singles[e.channel];
  return singles;
}

double window_profile(double delay, const CoincidenceConfig& config) {
  config.validate();
  if (delay < 0.0) throw std::invalid_argument("delay must be non-negative");
  const double t_ic = config.window();
  const double full = t_ic - config.t_clk;
  if (delay <= full) return 1.0;
  if (delay >= t_ic) return 0.0;
  return (t_ic - delay) / config.t_clk;
}

double simulate_window_profile(double delay, const CoincidenceConfig& config, std::size_t trials, std::uint64_t seed) {
  config.validate();
  if (delay < 0.0) throw std::invalid_argument("delay must be non-negative");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  CoincidenceConfig cfg = config;
  cfg.jitter_sigma = 0.0;
  const auto hits = run_streams<int>(trials, seed, 0, [&](Rng& rng) {
    const double phase = rng.uniform() * cfg.t_clk;
    const double t0 = 10.0 * cfg.t_clk + rng.uniform() * cfg.t_clk;
    const std::vector<PulseEvent> pair{{"1", t0}, {"2", t0 + delay}};
    return count_coincidences(pair, cfg, phase).empty() ? 0 : 1;
  });
  std::size_t n = 0;
  for (int h : hits) n += static_cast<std::size_t>(h);
  return static_cast<double>(n) / static_cast<double>(trials);
}

std::vector<PulseEvent> synthetic_pair_stream(double delay, std::size_t pairs, double spacing, double t_clk,
                                              std::uint64_t seed, const std::string& a, const std::string& b) {
  if (!(spacing > delay + t_clk)) throw std::invalid_argument("pair spacing must exceed delay plus one clock period");
  Rng rng(seed);
  std::vector<PulseEvent> events;
  events.reserve(2 * pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    const double t0 = static_cast<double>(p) * spacing + rng.uniform() * t_clk;
    events.push_back({a, t0});
    events.push_back({b, t0 + delay});
  }
  std::stable_sort(events.begin(), events.end(), [](const PulseEvent& x, const PulseEvent& y) { return x.t < y.t; });
  return events;
}

std::vector<PulseEvent> read_pulse_csv(std::istream& in) {
  std::vector<PulseEvent> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("channel", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("pulse CSV line " + std::to_string(lineno) + ": expected 'channel,t_ns'");
    PulseEvent e;
    e.channel = line.substr(0, comma);
    try {
      std::size_t used = 0;
      const std::string t = line.substr(comma + 1);
      e.t = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("pulse CSV line " + std::to_string(lineno) + ": bad timestamp");
    }
    if (e.t < 0.0) throw ConfigError("pulse CSV line " + std::to_string(lineno) + ": negative timestamp");
    events.push_back(std::move(e));
  }
  std::stable_sort(events.begin(), events.end(), [](const PulseEvent& x, const PulseEvent& y) { return x.t < y.t; });
  return events;
}

void write_pulse_csv(std::ostream& out, const std::vector<PulseEvent>& events) {
  out << "channel,t_ns\n";
  for (const auto& e : events) out << e.channel << ',' << std::setprecision(17) << e.t << '\n';
}

void write_coincidence_csv(std::ostream& out, const CoincidenceCounts& counts) {
  out << "channels,count\n";
  for (const auto& [channels, n] : counts) {
    std::string key;
    for (const auto& c : channels) {
      if (!key.empty()) key += '+';
      key += c;
    }
    out << key << ',' << n << '\n';
  }
}

}  // namespace heraldsim
