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

#include "doctest.h"
#include "test_util.hpp"

using namespace phc;

TEST_CASE("permanent of small known matrices") {
    CHECK(permanent(CMatrix::Identity(3, 3)) == Complex(1.0, 0.0));
    CHECK(permanent(CMatrix::Ones(3, 3)).real() == doctest::Approx(6.0));

    CMatrix m(2, 2);
    m << Complex(1, 1), Complex(2, 0), Complex(0, 3), Complex(1, -1);
    // ad + bc = (1+i)(1-i) + 2*3i = 2 + 6i
    const Complex p = permanent(m);
    CHECK(p.real() == doctest::Approx(2.0));
    CHECK(p.imag() == doctest::Approx(6.0));
}

TEST_CASE("ryser agrees with the permutation-sum oracle") {
    Rng rng(5);
    for (int n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 6; ++trial) {
            const CMatrix m = testing::ginibre(n, rng);
            const Complex naive = permanent_naive(m);
            const Complex ryser = permanent_ryser(m);
            CHECK(std::abs(naive - ryser) <= 1e-12 * std::max(1.0, std::abs(naive)));
        }
    }
}

TEST_CASE("dispatched permanent matches the oracle at 5x5") {
    Rng rng(6);
    const CMatrix m = testing::ginibre(5, rng);
    const Complex direct = permanent_naive(m);  // sum over all 120 permutations
    const Complex fast = permanent(m);
    CHECK(std::abs(direct - fast) <= 1e-12 * std::abs(direct));
}

TEST_CASE("permanent guards") {
    CHECK_THROWS_AS(permanent(CMatrix::Ones(2, 3)), InvalidArgument);
    CHECK_THROWS_AS(permanent(CMatrix::Identity(13, 13)), LimitError);
}
