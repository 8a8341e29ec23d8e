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

#include "heraldsim/types.hpp"

namespace heraldsim {

/// Permanent of a square complex matrix by Ryser's formula, visiting column
/// subsets in Gray-code order so each step updates the row sums by one
/// column. O(2^n n). The 0x0 permanent is 1.
cplx permanent(const Matrix& a);

}  // namespace heraldsim
