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

#include "photonchar/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "photonchar/engine.hpp"
#include "photonchar/interferometer.hpp"
#include "test_util.hpp"

using namespace phc;

namespace {

FullParameters protocol_truth() {
    return FullParameters(OverlapParameters(0.9, 0.85, 0.8, 0.0),
                          MeshParameters({0.5, 2.0 / 3.0, 0.0}, {0.0}));
}

std::vector<ConfigData> synthesize(const FullParameters& truth, std::int64_t samples_per_config,
                                   std::uint64_t seed) {
    std::vector<ConfigData> data;
    for (std::size_t k = 0; k < kCyclicPermutations3.size(); ++k) {
        const auto& cyc = kCyclicPermutations3[k];
        std::vector<int> perm(cyc.begin(), cyc.end());
        ConfigData entry(perm, OccupationList({1, 1, 1}),
                         CountTable(enumerate_outcomes(3, 3), std::vector<std::int64_t>(10, 0)));
        const Pmf model = model_pmf(entry, truth);
        data.emplace_back(perm, OccupationList({1, 1, 1}),
                          sample(model, samples_per_config, derive_stream(seed, k)));
    }
    return data;
}

}  // namespace

TEST_CASE("full parameter packing round trips") {
    const auto truth = protocol_truth();
    const auto array = truth.to_array();
    const auto back = FullParameters::from_array(array);
    CHECK(back.overlaps.x12 == truth.overlaps.x12);
    CHECK(back.mesh.splitting_ratios == truth.mesh.splitting_ratios);
    CHECK(array[4] == 0.5);
}

TEST_CASE("log likelihood basics") {
    const auto truth = protocol_truth();
    std::vector<int> identity_perm{0, 1, 2};
    ConfigData empty(identity_perm, OccupationList({1, 1, 1}),
                     CountTable(enumerate_outcomes(3, 3), std::vector<std::int64_t>(10, 0)));
    CHECK(log_likelihood({empty}, truth) == 0.0);

    // A single count contributes log P of that outcome.
    const Pmf model = model_pmf(empty, truth);
    std::vector<std::int64_t> counts(10, 0);
    counts[3] = 1;
    ConfigData single(identity_perm, OccupationList({1, 1, 1}),
                      CountTable(enumerate_outcomes(3, 3), counts));
    CHECK(log_likelihood({single}, truth) ==
          doctest::Approx(std::log(model.probabilities[3])).epsilon(1e-12));

    // Counts on a model-impossible outcome sink the likelihood.
    const FullParameters point_mass(OverlapParameters::equal(0.9),
                                    MeshParameters({0.0, 0.0, 0.0}, {0.0}));
    CHECK(log_likelihood({single}, point_mass) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("truth maximizes the likelihood on a grid around it") {
    const auto truth = protocol_truth();
    const auto data = synthesize(truth, 1000000, 99);
    const double at_truth = log_likelihood(data, truth);
    for (double dx12 : {-0.03, 0.0, 0.03}) {
        for (double dx23 : {-0.03, 0.0, 0.03}) {
            if (dx12 == 0.0 && dx23 == 0.0) continue;
            FullParameters shifted = truth;
            shifted.overlaps.x12 = truth.overlaps.x12 + dx12;
            shifted.overlaps.x23 = truth.overlaps.x23 + dx23;
            CHECK(log_likelihood(data, shifted) < at_truth);
        }
    }
}

TEST_CASE("fit recovers the truth within its own error bars") {
    const auto truth = protocol_truth();
    const auto data = synthesize(truth, 20000, 5);
    FullParameters init = truth;  // initialized at the programmed values
    FitOptions options;
    options.restarts = 3;
    options.seed = 1;
    const auto fit = mle_fit(data, init, options);
    CHECK(fit.converged);

    const auto covariance = fit.observed_fim.entries.inverse();
    const std::array<double, 3> estimate{fit.estimate.overlaps.x12, fit.estimate.overlaps.x13,
                                         fit.estimate.overlaps.x23};
    const std::array<double, 3> expected{0.9, 0.85, 0.8};
    for (int i = 0; i < 3; ++i) {
        const double sigma = std::sqrt(covariance(i, i));
        CHECK(std::abs(estimate[static_cast<std::size_t>(i)] -
                       expected[static_cast<std::size_t>(i)]) <= 3.0 * sigma);
    }
    for (double tvd : fit.tvd_per_config) {
        CHECK(tvd >= 0.0);
        CHECK(tvd < 0.05);
    }
    CHECK(fit.identifiability_condition >= 1.0);
}

TEST_CASE("fit pushed to the indistinguishable boundary") {
    const FullParameters truth(OverlapParameters::equal(1.0),
                               MeshParameters({0.5, 2.0 / 3.0, 0.0}, {0.0}));
    const auto data = synthesize(truth, 10000, 21);
    FullParameters init(OverlapParameters::equal(0.9), truth.mesh);
    FitOptions options;
    options.restarts = 2;
    options.seed = 3;
    const auto fit = mle_fit(data, init, options);
    CHECK(fit.estimate.overlaps.x12 >= 0.99);
    CHECK(fit.estimate.overlaps.x13 >= 0.99);
    CHECK(fit.estimate.overlaps.x23 >= 0.99);
}

TEST_CASE("relabeling configurations relabels the maximum likelihood") {
    const auto truth = protocol_truth();
    auto data = synthesize(truth, 2000, 17);

    // Swap photons 1 and 2 everywhere: permute each config's routing and
    // relabel the overlap axes of the initial guess accordingly.
    const std::vector<int> swap{0, 2, 1};
    std::vector<ConfigData> relabeled;
    for (const auto& entry : data) {
        std::vector<int> new_perm(3);
        for (int j = 0; j < 3; ++j) {
            new_perm[static_cast<std::size_t>(swap[static_cast<std::size_t>(j)])] =
                entry.input_permutation[static_cast<std::size_t>(j)];
        }
        relabeled.emplace_back(new_perm, entry.input, entry.counts);
    }
    FullParameters init = truth;
    FullParameters init_swapped = truth;
    init_swapped.overlaps = OverlapParameters(truth.overlaps.x13, truth.overlaps.x12,
                                              truth.overlaps.x23, -truth.overlaps.triad_phase);

    FitOptions options;
    options.restarts = 1;
    options.seed = 11;
    const auto a = mle_fit(data, init, options);
    const auto b = mle_fit(relabeled, init_swapped, options);
    CHECK(a.log_likelihood ==
          doctest::Approx(b.log_likelihood).epsilon(1e-6));
}

TEST_CASE("observed information doubles with duplicated data") {
    const auto truth = protocol_truth();
    const auto data = synthesize(truth, 5000, 8);

    // Doubling the counts doubles every log-likelihood term exactly
    // (scaling by two is exact in floating point), so the Hessian doubles
    // bit for bit.
    std::vector<ConfigData> doubled_counts;
    for (const auto& entry : data) {
        auto counts = entry.counts.counts;
        for (auto& c : counts) c *= 2;
        doubled_counts.emplace_back(entry.input_permutation, entry.input,
                                    CountTable(entry.counts.outcomes, counts));
    }
    const auto single = observed_fim(data, truth);
    const auto twice = observed_fim(doubled_counts, truth);
    CHECK((twice.entries - 2.0 * single.entries).cwiseAbs().maxCoeff() == 0.0);

    // Concatenating the dataset with itself is the same matrix up to
    // summation order (rounding noise is amplified by the 1/h^2 of the
    // difference stencil).
    auto concatenated = data;
    for (const auto& entry : data) concatenated.push_back(entry);
    const auto concat = observed_fim(concatenated, truth);
    const double scale = single.entries.cwiseAbs().maxCoeff();
    CHECK((concat.entries - 2.0 * single.entries).cwiseAbs().maxCoeff() <= 1e-6 * scale);
}

TEST_CASE("observed information vanishes without data") {
    std::vector<int> identity_perm{0, 1, 2};
    ConfigData empty(identity_perm, OccupationList({1, 1, 1}),
                     CountTable(enumerate_outcomes(3, 3), std::vector<std::int64_t>(10, 0)));
    const auto f = observed_fim({empty}, protocol_truth());
    CHECK(f.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("observed information approaches the expected information") {
    const auto truth = protocol_truth();
    const auto data = synthesize(truth, 1000000, 13);
    const auto observed = observed_fim(data, truth);

    ExperimentDesign design = ExperimentDesign::permuted_fig1(1.0 / 3.0);
    const auto expected = summed_fim(design, truth.overlaps);
    // Per-sample comparison: 3e6 total samples, equal weights.
    const RMatrix per_sample = observed.entries / 3e6;
    const double rel = (per_sample - expected.entries).cwiseAbs().maxCoeff() /
                       expected.entries.cwiseAbs().maxCoeff();
    CHECK(rel <= 5e-3);
}

TEST_CASE("observed information handles boundary estimates") {
    const FullParameters boundary(OverlapParameters::equal(1.0),
                                  MeshParameters({0.5, 2.0 / 3.0, 0.0}, {0.0}));
    const auto data = synthesize(boundary, 2000, 30);
    bool indefinite = false;
    const auto f = observed_fim(data, boundary, 1e-4, &indefinite);
    CHECK(std::isfinite(f.entries.cwiseAbs().maxCoeff()));
}

TEST_CASE("recovered magnitudes tighten with more data") {
    const auto truth = protocol_truth();
    const std::array<double, 3> expected{0.9, 0.85, 0.8};
    FitOptions options;
    options.restarts = 1;
    std::vector<double> median_errors;
    for (const std::int64_t size : {1000, 10000}) {
        std::vector<double> errors;
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const auto data = synthesize(truth, size, 500 + seed);
            options.seed = seed;
            const auto fit = mle_fit(data, truth, options);
            const std::array<double, 3> estimate{fit.estimate.overlaps.x12,
                                                 fit.estimate.overlaps.x13,
                                                 fit.estimate.overlaps.x23};
            double mae = 0.0;
            for (int i = 0; i < 3; ++i) {
                mae += std::abs(estimate[static_cast<std::size_t>(i)] -
                                expected[static_cast<std::size_t>(i)]) /
                       3.0;
            }
            errors.push_back(mae);
        }
        std::sort(errors.begin(), errors.end());
        median_errors.push_back((errors[2] + errors[3]) / 2.0);
    }
    CHECK(median_errors[0] > median_errors[1]);
}

TEST_CASE("count tables must be canonical") {
    auto outcomes = enumerate_outcomes(3, 3);
    std::swap(outcomes[0], outcomes[1]);
    CHECK_THROWS_AS(ConfigData({0, 1, 2}, OccupationList({1, 1, 1}),
                               CountTable(outcomes, std::vector<std::int64_t>(10, 0))),
                    InvalidArgument);
}

TEST_CASE("convergence study scales and brackets") {
    const auto truth = protocol_truth();
    const auto design = ExperimentDesign::permuted_fig1(1.0 / 3.0);

    std::vector<std::vector<int>> streams;
    for (std::size_t k = 0; k < design.configs.size(); ++k) {
        ConfigData entry(design.configs[k].input_permutation, design.configs[k].input,
                         CountTable(enumerate_outcomes(3, 3), std::vector<std::int64_t>(10, 0)));
        streams.push_back(sample_stream(model_pmf(entry, truth), 20000, derive_stream(77, k)));
    }
    const std::vector<std::int64_t> checkpoints{1000, 4000, 20000};
    const auto points =
        convergence_study(design, truth, streams, checkpoints, ConvergenceMode::hold_truth);
    REQUIRE(points.size() == 3);

    // det-inverse references scale exactly as n^-3.
    for (const auto& point : points) {
        const double n3 = std::pow(static_cast<double>(point.n_per_config), 3.0);
        const double first = points.front().ideal_reference.det_inv *
                             std::pow(static_cast<double>(points.front().n_per_config), 3.0);
        CHECK(point.ideal_reference.det_inv * n3 == doctest::Approx(first).epsilon(1e-9));
        CHECK(point.hom_reference.det_inv <
              std::numeric_limits<double>::infinity());
        // The protocol design dominates the pairwise baseline.
        CHECK(point.ideal_reference.det_inv < point.hom_reference.det_inv);
    }

    // The observed curve tracks the ideal reference as data accumulates.
    const auto& last = points.back();
    CHECK(std::abs(last.observed.det_inv - last.ideal_reference.det_inv) <=
          0.25 * last.ideal_reference.det_inv);

    CHECK_THROWS_AS(convergence_study(design, truth, streams, {4000, 1000},
                                      ConvergenceMode::hold_truth),
                    InvalidArgument);
}

TEST_CASE("convergence study refit mode") {
    const auto truth = protocol_truth();
    const auto design = ExperimentDesign::permuted_fig1(1.0 / 3.0);
    std::vector<std::vector<int>> streams;
    for (std::size_t k = 0; k < design.configs.size(); ++k) {
        ConfigData entry(design.configs[k].input_permutation, design.configs[k].input,
                         CountTable(enumerate_outcomes(3, 3), std::vector<std::int64_t>(10, 0)));
        streams.push_back(sample_stream(model_pmf(entry, truth), 3000, derive_stream(78, k)));
    }
    FitOptions options;
    options.restarts = 1;
    options.seed = 2;
    const auto points = convergence_study(design, truth, streams, {1000, 3000},
                                          ConvergenceMode::refit, options);
    REQUIRE(points.size() == 2);
    for (const auto& point : points) {
        CHECK(std::isfinite(point.observed.det_inv));
    }
}
