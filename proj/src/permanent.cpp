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

#include "heraldsim/permanent.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace heraldsim {

cplx permanent(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("permanent of a non-square matrix");
  const auto n = static_cast<int>(a.rows());
  if (n == 0) return {1.0, 0.0};
  if (n > 30) throw std::invalid_argument("permanent size exceeds supported range");

  // perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij
  std::vector<cplx> row_sums(static_cast<std::size_t>(n), cplx{});
  cplx total{};
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < subsets; ++step) {
    const int col = std::countr_zero(step);
    const std::uint64_t bit = std::uint64_t{1} << col;
    gray ^= bit;
    const double sign_col = (gray & bit) ? 1.0 : -1.0;
    cplx prod{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
      row_sums[static_cast<std::size_t>(i)] += sign_col * a(i, col);
      prod *= row_sums[static_cast<std::size_t>(i)];
    }
    const bool odd = (std::popcount(gray) & 1) != 0;
    total += odd ? -prod : prod;
  }
  return (n % 2 == 0) ? total : -total;
}

}  // namespace heraldsim
