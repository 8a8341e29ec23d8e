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

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace heraldsim {

/// Rising edge of a detector pulse.
struct PulseEvent {
  std::string channel;
  double t = 0.0;  ///< ns

  auto operator<=>(const PulseEvent&) const = default;
};

struct CoincidenceConfig {
  double t_clk = 2.9;  ///< clock period, ns
  int window_cycles = 3;
  int n_channels = 6;
  /// Gaussian timestamp jitter, ns; 0 disables.
  double jitter_sigma = 0.0;
  /// Pulses on one channel closer than this collapse into the first, ns.
  double dead_time = 50.0;

  void validate() const;
  double window() const { return t_clk * window_cycles; }
};

/// Pulse aligned to the first clock tick at or after its timestamp.
struct SyncedEvent {
  std::string channel;
  std::int64_t tick = 0;
  double t_sync = 0.0;  ///< ns
  double t_raw = 0.0;   ///< ns
};

/// Ticks sit at clock_phase + k t_clk. Events must be time-sorted.
std::vector<SyncedEvent> synchronize(const std::vector<PulseEvent>& events, double t_clk, double clock_phase);

/// Drops pulses arriving within `dead_time` of the previous accepted pulse on the same channel.
std::vector<PulseEvent> apply_dead_time(const std::vector<PulseEvent>& events, double dead_time);

/// Adds N(0, sigma) to every timestamp (clamped at 0) and re-sorts.
std::vector<PulseEvent> apply_jitter(const std::vector<PulseEvent>& events, double sigma, std::uint64_t seed);

using ChannelSet = std::set<std::string>;
using CoincidenceCounts = std::map<ChannelSet, std::uint64_t>;

/// Greedy earliest-window grouping: a window opens at the earliest unassigned
/// synchronized pulse and takes every pulse whose tick is fewer than
/// window_cycles ticks later. Windows with two or more distinct channels are
/// recorded under their channel set. Each pulse joins exactly one window.
CoincidenceCounts count_coincidences(const std::vector<PulseEvent>& events, const CoincidenceConfig& config,
                                     double clock_phase = 0.0, std::uint64_t jitter_seed = 0);

/// Pulses per channel after dead-time filtering.
std::map<std::string, std::uint64_t> count_singles(const std::vector<PulseEvent>& events, const CoincidenceConfig& config);

/// Coincidence probability of two pulses `delay` apart under a uniformly
/// random clock phase: 1 up to T_IC - T_clk, linear to 0 at T_IC.
double window_profile(double delay, const CoincidenceConfig& config);

/// Monte Carlo estimate of window_profile over `trials` random clock phases.
double simulate_window_profile(double delay, const CoincidenceConfig& config, std::size_t trials, std::uint64_t seed);

/// Two-channel stream of `pairs` pulse pairs `delay` apart, pair starts spaced
/// by `spacing` ns plus a uniform offset in [0, t_clk) so clock phases are uniform.
std::vector<PulseEvent> synthetic_pair_stream(double delay, std::size_t pairs, double spacing, double t_clk,
                                              std::uint64_t seed, const std::string& a = "1", const std::string& b = "2");

/// CSV with header "channel,t_ns"; result is time-sorted.
std::vector<PulseEvent> read_pulse_csv(std::istream& in);
void write_pulse_csv(std::ostream& out, const std::vector<PulseEvent>& events);

/// CSV with header "channels,count"; channel sets joined by '+'.
void write_coincidence_csv(std::ostream& out, const CoincidenceCounts& counts);

}  // namespace heraldsim
