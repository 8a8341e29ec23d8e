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
#include <functional>
#include <iterator>
#include <random>
#include <span>
#include <vector>

namespace heraldsim {

/// Monte Carlo runs are cut into this many independent streams regardless of
/// the thread count, so results depend on the seed alone.
inline constexpr std::size_t kMonteCarloStreams = 16;

/// Seed splitting rule: stream w of a run seeded with `seed` uses
/// splitmix64(seed ^ splitmix64(w + 1)). Stream outputs are concatenated in
/// stream order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 with a fully specified mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) from the top 53 bits of one engine draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn from a cumulative distribution (last entry ~ total weight).
  std::size_t pick(std::span<const double> cumulative);

  double normal(double mean, double sigma);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Number of workers used when a caller passes 0.
std::size_t default_workers();

/// Runs body(index) for index in [0, count) across `workers` threads. Each
/// index is processed exactly once; callers write results by index, so output
/// ordering is deterministic.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

/// Splits `shots` into `streams` contiguous chunks; earlier chunks take the remainder.
std::vector<std::size_t> split_shots(std::size_t shots, std::size_t streams);

/// Draws `shots` values, stream w generating its share with Rng(derive_seed(seed, w)).
template <class T>
std::vector<T> run_streams(std::size_t shots, std::uint64_t seed, std::size_t workers,
                           const std::function<T(Rng&)>& draw) {
  const auto sizes = split_shots(shots, kMonteCarloStreams);
  std::vector<std::vector<T>> parts(sizes.size());
  parallel_for(sizes.size(), workers, [&](std::size_t w) {
    Rng rng(derive_seed(seed, w));
    parts[w].reserve(sizes[w]);
    for (std::size_t s = 0; s < sizes[w]; ++s) parts[w].push_back(draw(rng));
  });
  std::vector<T> out;
  out.reserve(shots);
  for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return out;
}

}  // namespace heraldsim
