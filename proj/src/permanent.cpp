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

#include "photonchar/permanent.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace phc {

namespace {

void check_square(const CMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("permanent requires a square matrix");
    if (m.rows() > kPermanentMaxDim) {
        throw LimitError("permanent dimension " + std::to_string(m.rows()) + " exceeds guard of " +
                         std::to_string(kPermanentMaxDim));
    }
}

}  // namespace

Complex permanent_naive(const CMatrix& m) {
    check_square(m);
    const int n = static_cast<int>(m.rows());
    if (n == 0) return Complex(1.0, 0.0);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Complex total(0.0, 0.0);
    do {
        Complex term(1.0, 0.0);
        for (int i = 0; i < n; ++i) term *= m(i, perm[static_cast<std::size_t>(i)]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

Complex permanent_ryser(const CMatrix& m) {
    check_square(m);
    const int n = static_cast<int>(m.rows());
    if (n == 0) return Complex(1.0, 0.0);
    // Gray-code walk over non-empty column subsets; row_sums tracks
    // sum_{j in S} m(i, j).
    std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex(0.0, 0.0));
    Complex total(0.0, 0.0);
    std::uint64_t gray = 0;
    double sign = 1.0;  // (-1)^(n - |S|), updated incrementally
    const std::uint64_t count = (1ULL << n) - 1;
    int popcount = 0;
    for (std::uint64_t k = 1; k <= count; ++k) {
        const std::uint64_t next_gray = k ^ (k >> 1);
        const std::uint64_t changed = gray ^ next_gray;
        const int j = std::countr_zero(changed);
        const bool added = (next_gray & changed) != 0;
        for (int i = 0; i < n; ++i) {
            if (added) {
                row_sums[static_cast<std::size_t>(i)] += m(i, j);
            } else {
                row_sums[static_cast<std::size_t>(i)] -= m(i, j);
            }
        }
        popcount += added ? 1 : -1;
        gray = next_gray;
        Complex prod(1.0, 0.0);
        for (int i = 0; i < n; ++i) prod *= row_sums[static_cast<std::size_t>(i)];
        sign = ((n - popcount) % 2 == 0) ? 1.0 : -1.0;
        total += sign * prod;
    }
    return total;
}

Complex permanent(const CMatrix& m) {
    check_square(m);
    // Naive up to 4 so the slow path stays the in-tree oracle for Ryser.
    if (m.rows() <= 4) return permanent_naive(m);
    return permanent_ryser(m);
}

}  // namespace phc
