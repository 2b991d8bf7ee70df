// Copyright 2026 photonchar contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHOTONCHAR_PERMANENT_HPP
#define PHOTONCHAR_PERMANENT_HPP

#include "photonchar/core.hpp"

namespace phc {

/// Hard dimension guard for permanent evaluation.
inline constexpr int kPermanentMaxDim = 12;

/// Matrix permanent. Uses the direct permutation sum for dim <= 4 and a
/// Gray-code Ryser evaluation above, so the naive path doubles as an
/// in-tree oracle for the fast one. Throws InvalidArgument for non-square
/// input and LimitError above kPermanentMaxDim.
Complex permanent(const CMatrix& m);

/// Direct sum over all n! permutations (any dim <= kPermanentMaxDim).
Complex permanent_naive(const CMatrix& m);

/// Ryser's formula with Gray-code subset updates, O(2^n * n).
Complex permanent_ryser(const CMatrix& m);

}  // namespace phc

#endif
