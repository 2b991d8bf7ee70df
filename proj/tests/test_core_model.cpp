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

#include "photonchar/core.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace phc;

TEST_CASE("occupation to assignment examples") {
    CHECK(occupation_to_assignment(OccupationList({1, 1, 1})).values() == std::vector<int>{0, 1, 2});
    CHECK(occupation_to_assignment(OccupationList({0, 2, 1})).values() == std::vector<int>{1, 1, 2});
    CHECK(occupation_to_assignment(OccupationList({3, 0, 0})).values() == std::vector<int>{0, 0, 0});
}

TEST_CASE("assignment round trip") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_modes = 2 + static_cast<int>(rng.next_u64() % 4);
        std::vector<int> occ(static_cast<std::size_t>(n_modes));
        for (auto& c : occ) c = static_cast<int>(rng.next_u64() % 3);
        occ[0] += 1;  // at least one photon
        const OccupationList original(occ);
        const auto assignment = occupation_to_assignment(original);
        CHECK(assignment_to_occupation(assignment, n_modes) == original);
    }
}

TEST_CASE("outcome enumeration counts and order") {
    CHECK(enumerate_outcomes(3, 3).size() == 10);
    CHECK(enumerate_outcomes(1, 4).size() == 4);
    CHECK(outcome_count(3, 3) == 10);

    const auto two_two = enumerate_outcomes(2, 2);
    REQUIRE(two_two.size() == 3);
    CHECK(two_two[0].values() == std::vector<int>{2, 0});
    CHECK(two_two[1].values() == std::vector<int>{1, 1});
    CHECK(two_two[2].values() == std::vector<int>{0, 2});
}

TEST_CASE("outcome enumeration is stable and indexable") {
    const auto a = enumerate_outcomes(3, 4);
    const auto b = enumerate_outcomes(3, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(outcome_index(a[i]) == static_cast<int>(i));
    }
}

TEST_CASE("overlap parameters round trip through the gram matrix") {
    const OverlapParameters theta(0.6, 0.5, 0.55, 0.9);
    const auto back = OverlapParameters::from_matrix(theta.to_matrix());
    CHECK(back.x12 == doctest::Approx(theta.x12).epsilon(1e-12));
    CHECK(back.x13 == doctest::Approx(theta.x13).epsilon(1e-12));
    CHECK(back.x23 == doctest::Approx(theta.x23).epsilon(1e-12));
    CHECK(back.triad_phase == doctest::Approx(theta.triad_phase).epsilon(1e-12));
}

TEST_CASE("overlap parameters reject unphysical combinations") {
    CHECK_THROWS_AS(OverlapParameters(0.9, 0.9, 0.1), PhysicsError);
    CHECK_THROWS_AS(OverlapParameters(1.2, 0.5, 0.5), InvalidArgument);
    CHECK_NOTHROW(OverlapParameters(1.0, 1.0, 1.0));  // rank-1 boundary
    CHECK_NOTHROW(OverlapParameters(0.9, 0.85, 0.8, 0.0));
}

TEST_CASE("triad phase moves physicality") {
    // At phase 0 this triple is PSD; at phase pi the determinant flips sign.
    CHECK_NOTHROW(OverlapParameters(0.7, 0.7, 0.7, 0.0));
    CHECK_THROWS_AS(OverlapParameters(0.7, 0.7, 0.7, M_PI), PhysicsError);
}

TEST_CASE("distinguishability matrix validation") {
    CMatrix bad = CMatrix::Identity(3, 3);
    bad(0, 1) = Complex(0.5, 0.1);
    bad(1, 0) = Complex(0.5, 0.1);  // not Hermitian
    CHECK_THROWS_AS(DistinguishabilityMatrix{bad}, PhysicsError);

    CMatrix diag = CMatrix::Identity(3, 3);
    diag(1, 1) = Complex(0.9, 0.0);
    CHECK_THROWS_AS(DistinguishabilityMatrix{diag}, PhysicsError);

    CHECK(DistinguishabilityMatrix::all_ones(3).smallest_eigenvalue() ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("permuting a gram matrix preserves its structure") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 3);
        const auto s = testing::random_gram(n, rng);
        const auto perm = testing::random_permutation(n, rng);
        const auto permuted = s.permuted(perm);  // constructor re-validates
        CHECK(permuted.smallest_eigenvalue() >= -1e-12);
        for (int i = 0; i < n; ++i) {
            CHECK(permuted.entries()(i, i) == Complex(1.0, 0.0));
        }
    }
}

TEST_CASE("scattering matrix rejects non-unitary input") {
    CMatrix m = CMatrix::Identity(3, 3);
    m(0, 0) = Complex(0.9, 0.0);
    CHECK_THROWS_AS(ScatteringMatrix{m}, PhysicsError);
}

TEST_CASE("mesh parameter counting") {
    CHECK(MeshParameters::ratio_count(3) == 3);
    CHECK(MeshParameters::phase_count(3) == 1);
    CHECK(MeshParameters::ratio_count(2) == 1);
    CHECK(MeshParameters::phase_count(2) == 0);
    CHECK(MeshParameters::ratio_count(4) == 6);
    CHECK(MeshParameters::phase_count(4) == 3);

    CHECK_NOTHROW(MeshParameters({0.5, 0.3, 0.0}, {0.1}).validate(3));
    CHECK_THROWS_AS(MeshParameters({0.5, 0.3}, {0.1}).validate(3), InvalidArgument);
    CHECK_THROWS_AS(MeshParameters({0.5, 0.3, 1.5}, {0.1}).validate(3), InvalidArgument);
}

TEST_CASE("experiment config validates its permutation") {
    MeshParameters mesh({0.5, 0.3, 0.0}, {0.0});
    OccupationList input({1, 1, 1});
    CHECK_NOTHROW(ExperimentConfig(mesh, input, {2, 0, 1}));
    CHECK_THROWS_AS(ExperimentConfig(mesh, input, {0, 0, 1}), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig(mesh, input, {0, 1}), InvalidArgument);
}

TEST_CASE("design weights normalize") {
    const auto design = ExperimentDesign::permuted_fig1(1.0 / 3.0);
    REQUIRE(design.n_configs() == 3);
    double sum = 0.0;
    for (double w : design.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(design.configs[1].input_permutation == std::vector<int>{1, 2, 0});

    ExperimentDesign scaled({design.configs[0]}, {7.0});
    CHECK(scaled.weights[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(ExperimentDesign({}, {}), InvalidArgument);
}

TEST_CASE("pmf invariants are enforced") {
    auto outcomes = enumerate_outcomes(1, 2);
    CHECK_NOTHROW(Pmf(outcomes, {0.25, 0.75}));
    CHECK_THROWS_AS(Pmf(outcomes, {0.5, 0.6}), PhysicsError);
    CHECK_THROWS_AS(Pmf(outcomes, {-0.1, 1.1}), PhysicsError);

    const Pmf p(outcomes, {0.25, 0.75});
    CHECK(p.probability_of(OccupationList({0, 1})) == doctest::Approx(0.75));
    CHECK_THROWS_AS(p.index_of(OccupationList({2, 0})), InvalidArgument);
}

TEST_CASE("count table totals") {
    const CountTable t(enumerate_outcomes(1, 2), {3, 4});
    CHECK(t.total == 7);
    CHECK_THROWS_AS(CountTable(enumerate_outcomes(1, 2), {-1, 2}), InvalidArgument);
}

TEST_CASE("fisher matrix symmetry validation") {
    RMatrix ok(2, 2);
    ok << 1.0, 0.5, 0.5, 2.0;
    CHECK_NOTHROW(FisherMatrix(ok, {"a", "b"}));
    RMatrix bad(2, 2);
    bad << 1.0, 0.5, 0.4, 2.0;
    CHECK_THROWS_AS(FisherMatrix(bad, {"a", "b"}), InvalidArgument);
}

TEST_CASE("pair magnitude labels") {
    CHECK(pair_magnitude_labels(3) == overlap_magnitude_labels());
    CHECK(pair_magnitude_labels(4) ==
          std::vector<std::string>{"x12", "x13", "x14", "x23", "x24", "x34"});
}
