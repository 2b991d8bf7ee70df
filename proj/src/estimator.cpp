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
#include <limits>

#include "photonchar/engine.hpp"
#include "photonchar/interferometer.hpp"
#include "photonchar/optim.hpp"
#include "photonchar/rng.hpp"

namespace phc {

namespace detail {
Pmf pmf_impl(const ScatteringMatrix& u, const OccupationList& input,
             const DistinguishabilityMatrix& s_matrix, bool strict);
Pmf pmf_raw(const ScatteringMatrix& u, const OccupationList& input, const CMatrix& s, bool strict);
}  // namespace detail

namespace {

constexpr double kModelProbabilityFloor = 1e-300;
constexpr double kPsdBarrierSlack = 1e-9;
constexpr double kPsdBarrierWeight = 1e6;

CMatrix raw_gram(double x12, double x13, double x23, double phase) {
    CMatrix s(3, 3);
    const Complex s13 = std::polar(x13, phase);
    s << Complex(1, 0), Complex(x12, 0), s13, Complex(x12, 0), Complex(1, 0), Complex(x23, 0),
        std::conj(s13), Complex(x23, 0), Complex(1, 0);
    return s;
}

double smallest_gram_eigenvalue(const CMatrix& s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(s, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// Magnitudes slightly outside the PSD region are pulled back by flooring
/// the Gram eigenvalues at zero and renormalizing the diagonal; the gauge
/// read-back then yields valid overlap parameters.
OverlapParameters project_to_physical(double x12, double x13, double x23, double phase) {
    CMatrix s = raw_gram(std::clamp(x12, 0.0, 1.0), std::clamp(x13, 0.0, 1.0),
                         std::clamp(x23, 0.0, 1.0), phase);
    if (smallest_gram_eigenvalue(s) >= -1e-12) {
        return OverlapParameters(std::clamp(x12, 0.0, 1.0), std::clamp(x13, 0.0, 1.0),
                                 std::clamp(x23, 0.0, 1.0), phase);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(s);
    Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
    CMatrix floored = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
    Eigen::VectorXd diag = floored.diagonal().real().cwiseMax(1e-12);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            floored(i, j) /= std::sqrt(diag[i] * diag[j]);
        }
    }
    return OverlapParameters::from_matrix(DistinguishabilityMatrix(floored));
}

struct ModelCache {
    std::vector<ScatteringMatrix> unitaries;
};

ScatteringMatrix data_unitary(const ConfigData& data, const MeshParameters& mesh) {
    return config_unitary(ExperimentConfig(mesh, data.input, data.input_permutation));
}

double log_likelihood_raw(const std::vector<ConfigData>& data, const std::array<double, 8>& v) {
    const CMatrix s = raw_gram(v[0], v[1], v[2], v[3]);
    const MeshParameters mesh({v[4], v[5], v[6]}, {v[7]});
    double total = 0.0;
    for (const auto& entry : data) {
        const auto u = data_unitary(entry, mesh);
        const Pmf model = detail::pmf_raw(u, entry.input, s, /*strict=*/false);
        for (std::size_t i = 0; i < entry.counts.counts.size(); ++i) {
            const std::int64_t c = entry.counts.counts[i];
            if (c == 0) continue;
            const double p = model.probabilities[i];
            if (p < kModelProbabilityFloor) return -std::numeric_limits<double>::infinity();
            total += static_cast<double>(c) * std::log(p);
        }
    }
    return total;
}

}  // namespace

FullParameters::FullParameters(OverlapParameters overlaps_, MeshParameters mesh_)
    : overlaps(overlaps_), mesh(std::move(mesh_)) {
    mesh.validate(3);
}

std::array<double, 8> FullParameters::to_array() const {
    return {overlaps.x12,          overlaps.x13,          overlaps.x23,          overlaps.triad_phase,
            mesh.splitting_ratios[0], mesh.splitting_ratios[1], mesh.splitting_ratios[2],
            mesh.phases[0]};
}

FullParameters FullParameters::from_array(const std::array<double, 8>& a) {
    return FullParameters(OverlapParameters(a[0], a[1], a[2], a[3]),
                          MeshParameters({a[4], a[5], a[6]}, {a[7]}));
}

ConfigData::ConfigData(std::vector<int> perm, OccupationList input_, CountTable counts_)
    : input_permutation(std::move(perm)), input(std::move(input_)), counts(std::move(counts_)) {
    if (counts.n_outcomes() !=
        static_cast<int>(outcome_count(input.n_photons(), input.n_modes()))) {
        throw InvalidArgument("count table does not cover the canonical outcome set");
    }
    const auto canonical = enumerate_outcomes(input.n_photons(), input.n_modes());
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        if (!(counts.outcomes[i] == canonical[i])) {
            throw InvalidArgument("count table outcomes are not in canonical order");
        }
    }
}

Pmf model_pmf(const ConfigData& data, const FullParameters& params) {
    const auto u = data_unitary(data, params.mesh);
    return detail::pmf_raw(u, data.input, params.overlaps.to_matrix().entries(), /*strict=*/false);
}

double log_likelihood(const std::vector<ConfigData>& data, const FullParameters& params) {
    return log_likelihood_raw(data, params.to_array());
}

FitResult mle_fit(const std::vector<ConfigData>& data, const FullParameters& init,
                  const FitOptions& options) {
    if (data.empty()) throw InvalidArgument("no data to fit");
    std::int64_t total_counts = 0;
    for (const auto& entry : data) total_counts += entry.counts.total;
    if (total_counts == 0) throw InvalidArgument("the fit needs at least one nonzero count");

    RVector lower(8), upper(8);
    lower << 0.0, 0.0, 0.0, -M_PI, 0.0, 0.0, 0.0, -M_PI;
    upper << 1.0, 1.0, 1.0, M_PI, 1.0, 1.0, 1.0, M_PI;

    auto objective = [&](const RVector& v) {
        std::array<double, 8> a;
        for (int i = 0; i < 8; ++i) a[static_cast<std::size_t>(i)] = v[i];
        const double lambda_min = smallest_gram_eigenvalue(raw_gram(a[0], a[1], a[2], a[3]));
        double penalty = 0.0;
        if (lambda_min < -kPsdBarrierSlack) {
            penalty = kPsdBarrierWeight * (-kPsdBarrierSlack - lambda_min);
        }
        double ll;
        try {
            ll = log_likelihood_raw(data, a);
        } catch (const Error&) {
            return 1e15 + penalty;
        }
        if (!std::isfinite(ll)) return 1e12 + penalty;
        return -ll + penalty;
    };

    const auto init_array = init.to_array();
    std::vector<RVector> starts(static_cast<std::size_t>(std::max(1, options.restarts)));
    {
        RVector v(8);
        for (int i = 0; i < 8; ++i) v[i] = init_array[static_cast<std::size_t>(i)];
        starts[0] = v;
    }
    for (std::size_t r = 1; r < starts.size(); ++r) {
        Rng rng(derive_stream(options.seed, static_cast<std::uint64_t>(r)));
        RVector v(8);
        for (int i = 0; i < 3; ++i) v[i] = rng.uniform(0.05, 0.98);
        v[3] = rng.uniform(-M_PI, M_PI);
        for (int i = 4; i < 7; ++i) v[i] = rng.uniform(0.02, 0.98);
        v[7] = rng.uniform(-M_PI, M_PI);
        starts[r] = v;
    }

    NelderMeadOptions nm_options;
    nm_options.max_iterations = options.nm_max_iterations;
    nm_options.initial_scale = 0.05;
    std::vector<NelderMeadResult> results(starts.size());
    parallel_for(static_cast<int>(starts.size()), [&](int r) {
        results[static_cast<std::size_t>(r)] =
            nelder_mead(objective, starts[static_cast<std::size_t>(r)], lower, upper, nm_options);
    });

    // Relabeling the photons and rerouting them through a transformed mesh
    // produces equivalent optima whose realized likelihoods differ only by
    // sampling noise. Candidates within a few nats of the best are
    // statistical ties; among ties the one nearest the initialization (the
    // experiment as programmed) carries the intended labeling.
    constexpr double kLikelihoodTie = 3.0;
    auto distance_to_init = [&](const RVector& v) {
        double d = 0.0;
        for (int i : {0, 1, 2, 4, 5, 6}) {
            const double delta = v[i] - init_array[static_cast<std::size_t>(i)];
            d += delta * delta;
        }
        for (int i : {3, 7}) {
            const double delta =
                std::remainder(v[i] - init_array[static_cast<std::size_t>(i)], 2.0 * M_PI);
            d += delta * delta;
        }
        return d;
    };
    double best_value = results[0].value;
    for (const auto& r : results) best_value = std::min(best_value, r.value);
    int best = -1;
    double best_distance = 0.0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        if (results[r].value > best_value + kLikelihoodTie) continue;
        const double distance = distance_to_init(results[r].x);
        bool better = best < 0 || distance < best_distance;
        if (best >= 0 && distance == best_distance) {
            for (int i = 0; i < 8; ++i) {
                if (results[r].x[i] != results[static_cast<std::size_t>(best)].x[i]) {
                    better = results[r].x[i] < results[static_cast<std::size_t>(best)].x[i];
                    break;
                }
            }
        }
        if (better) {
            best = static_cast<int>(r);
            best_distance = distance;
        }
    }

    NelderMeadOptions polish_options;
    polish_options.max_iterations = options.nm_max_iterations;
    polish_options.x_tolerance = 1e-10;
    polish_options.f_tolerance = 1e-13;
    polish_options.initial_scale = 0.01;
    const auto polished =
        nelder_mead(objective, results[static_cast<std::size_t>(best)].x, lower, upper,
                    polish_options);

    FitResult out;
    const RVector& v = polished.x;
    out.estimate = FullParameters(
        project_to_physical(v[0], v[1], v[2], v[3]),
        MeshParameters({std::clamp(v[4], 0.0, 1.0), std::clamp(v[5], 0.0, 1.0),
                        std::clamp(v[6], 0.0, 1.0)},
                       {v[7]}));
    out.log_likelihood = log_likelihood(data, out.estimate);
    out.converged = polished.converged ||
                    results[static_cast<std::size_t>(best)].converged;
    for (const auto& entry : data) {
        out.tvd_per_config.push_back(empirical_tvd(entry.counts, model_pmf(entry, out.estimate)));
    }
    bool indefinite = false;
    out.observed_fim = observed_fim(data, out.estimate, 1e-4, &indefinite);

    // Identifiability diagnostic: condition number of the observed
    // information over magnitudes plus the triad phase.
    {
        const auto est = out.estimate.to_array();
        auto nll4 = [&](const std::array<double, 4>& q) {
            std::array<double, 8> a = est;
            a[0] = q[0];
            a[1] = q[1];
            a[2] = q[2];
            a[3] = q[3];
            const double ll = log_likelihood_raw(data, a);
            return std::isfinite(ll) ? -ll : 1e12;
        };
        RMatrix h4 = RMatrix::Zero(4, 4);
        const std::array<double, 4> at{est[0], est[1], est[2], est[3]};
        const double step = 1e-4;
        std::array<double, 4> steps{};
        for (int i = 0; i < 4; ++i) {
            steps[static_cast<std::size_t>(i)] =
                i < 3 ? std::min({step, std::max(at[static_cast<std::size_t>(i)] / 2.0, 1e-7),
                                  std::max((1.0 - at[static_cast<std::size_t>(i)]) / 2.0, 1e-7)})
                      : step;
        }
        const double f0 = nll4(at);
        for (int i = 0; i < 4; ++i) {
            auto plus = at;
            auto minus = at;
            plus[static_cast<std::size_t>(i)] += steps[static_cast<std::size_t>(i)];
            minus[static_cast<std::size_t>(i)] -= steps[static_cast<std::size_t>(i)];
            h4(i, i) = (nll4(plus) - 2.0 * f0 + nll4(minus)) /
                       (steps[static_cast<std::size_t>(i)] * steps[static_cast<std::size_t>(i)]);
            for (int j = i + 1; j < 4; ++j) {
                auto pp = at, pm = at, mp = at, mm = at;
                pp[static_cast<std::size_t>(i)] += steps[static_cast<std::size_t>(i)];
                pp[static_cast<std::size_t>(j)] += steps[static_cast<std::size_t>(j)];
                pm[static_cast<std::size_t>(i)] += steps[static_cast<std::size_t>(i)];
                pm[static_cast<std::size_t>(j)] -= steps[static_cast<std::size_t>(j)];
                mp[static_cast<std::size_t>(i)] -= steps[static_cast<std::size_t>(i)];
                mp[static_cast<std::size_t>(j)] += steps[static_cast<std::size_t>(j)];
                mm[static_cast<std::size_t>(i)] -= steps[static_cast<std::size_t>(i)];
                mm[static_cast<std::size_t>(j)] -= steps[static_cast<std::size_t>(j)];
                const double cross = (nll4(pp) - nll4(pm) - nll4(mp) + nll4(mm)) /
                                     (4.0 * steps[static_cast<std::size_t>(i)] *
                                      steps[static_cast<std::size_t>(j)]);
                h4(i, j) = cross;
                h4(j, i) = cross;
            }
        }
        Eigen::SelfAdjointEigenSolver<RMatrix> eig((h4 + h4.transpose()) / 2.0,
                                                   Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        out.identifiability_condition =
            lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    }
    return out;
}

FisherMatrix observed_fim(const std::vector<ConfigData>& data, const FullParameters& params_hat,
                          double step, bool* indefinite) {
    const auto base = params_hat.to_array();
    auto nll = [&](double x12, double x13, double x23) {
        std::array<double, 8> a = base;
        a[0] = x12;
        a[1] = x13;
        a[2] = x23;
        const double ll = log_likelihood_raw(data, a);
        if (!std::isfinite(ll)) {
            throw PhysicsError("log-likelihood not finite at an observed-information stencil point");
        }
        return -ll;
    };
    auto eval = [&](const std::array<double, 3>& m) { return nll(m[0], m[1], m[2]); };

    const std::array<double, 3> at{base[0], base[1], base[2]};
    // Steps shrink near the bounds; one-sided stencils exactly at a bound.
    std::array<double, 3> h{};
    std::array<int, 3> side{};  // 0 central, +1 forward-only, -1 backward-only
    for (int i = 0; i < 3; ++i) {
        const double x = at[static_cast<std::size_t>(i)];
        double hi = std::min({step, x / 2.0, (1.0 - x) / 2.0});
        if (hi < 1e-8) {
            hi = std::min(step, 0.5);
            side[static_cast<std::size_t>(i)] = x < 0.5 ? +1 : -1;
            hi = std::min(hi, side[static_cast<std::size_t>(i)] > 0 ? (1.0 - x) / 2.0 : x / 2.0);
            hi = std::max(hi, 1e-6);
        }
        h[static_cast<std::size_t>(i)] = hi;
    }

    const double f0 = eval(at);
    RMatrix out = RMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
        const double hi = h[static_cast<std::size_t>(i)];
        auto shifted = [&](double amount) {
            auto m = at;
            m[static_cast<std::size_t>(i)] += amount;
            return eval(m);
        };
        if (side[static_cast<std::size_t>(i)] == 0) {
            out(i, i) = (shifted(hi) - 2.0 * f0 + shifted(-hi)) / (hi * hi);
        } else {
            const double direction = side[static_cast<std::size_t>(i)];
            out(i, i) =
                (f0 - 2.0 * shifted(direction * hi) + shifted(direction * 2.0 * hi)) / (hi * hi);
        }
        for (int j = i + 1; j < 3; ++j) {
            const double hj = h[static_cast<std::size_t>(j)];
            const double di = side[static_cast<std::size_t>(i)] == 0
                                  ? 1.0
                                  : static_cast<double>(side[static_cast<std::size_t>(i)]);
            const double dj = side[static_cast<std::size_t>(j)] == 0
                                  ? 1.0
                                  : static_cast<double>(side[static_cast<std::size_t>(j)]);
            auto shift2 = [&](double a_, double b_) {
                auto m = at;
                m[static_cast<std::size_t>(i)] += a_;
                m[static_cast<std::size_t>(j)] += b_;
                return eval(m);
            };
            double cross;
            if (side[static_cast<std::size_t>(i)] == 0 && side[static_cast<std::size_t>(j)] == 0) {
                cross = (shift2(hi, hj) - shift2(hi, -hj) - shift2(-hi, hj) + shift2(-hi, -hj)) /
                        (4.0 * hi * hj);
            } else {
                // One-sided mixed stencil anchored at the boundary corner.
                cross = (shift2(di * hi, dj * hj) - shift2(di * hi, 0.0) - shift2(0.0, dj * hj) +
                         f0) /
                        (di * hi * dj * hj);
            }
            out(i, j) = cross;
            out(j, i) = cross;
        }
    }
    out = ((out + out.transpose()) / 2.0).eval();
    if (indefinite != nullptr) {
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(out, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, out.cwiseAbs().maxCoeff());
        *indefinite = eig.eigenvalues().minCoeff() < -1e-8 * scale;
    }
    return FisherMatrix(std::move(out), overlap_magnitude_labels());
}

std::vector<ConvergencePoint> convergence_study(const ExperimentDesign& design,
                                                const FullParameters& truth,
                                                const std::vector<std::vector<int>>& streams,
                                                const std::vector<std::int64_t>& checkpoints,
                                                ConvergenceMode mode,
                                                const FitOptions& fit_options) {
    if (streams.size() != design.configs.size()) {
        throw InvalidArgument("one sample stream per design configuration is required");
    }
    if (checkpoints.empty()) throw InvalidArgument("no checkpoints given");
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
        if (checkpoints[i] <= checkpoints[i - 1]) {
            throw InvalidArgument("checkpoints must increase");
        }
    }
    for (const auto& config : design.configs) {
        bool close = config.mesh.splitting_ratios.size() == truth.mesh.splitting_ratios.size() &&
                     config.mesh.phases.size() == truth.mesh.phases.size();
        for (std::size_t i = 0; close && i < truth.mesh.splitting_ratios.size(); ++i) {
            close = std::abs(config.mesh.splitting_ratios[i] - truth.mesh.splitting_ratios[i]) <=
                    1e-9;
        }
        for (std::size_t i = 0; close && i < truth.mesh.phases.size(); ++i) {
            close = std::abs(config.mesh.phases[i] - truth.mesh.phases[i]) <= 1e-9;
        }
        if (!close) {
            throw InvalidArgument("convergence study requires configs programmed at the truth mesh");
        }
    }
    for (const auto& stream : streams) {
        if (static_cast<std::int64_t>(stream.size()) < checkpoints.back()) {
            throw InvalidArgument("streams are shorter than the last checkpoint");
        }
    }

    const FisherMatrix per_sample_ideal = summed_fim(design, truth.overlaps);
    const FisherMatrix per_sample_hom = hom_baseline_fim(truth.overlaps);
    const double k_configs = static_cast<double>(design.configs.size());

    std::vector<Pmf> models;
    std::vector<ConfigData> full_data;
    for (std::size_t k = 0; k < design.configs.size(); ++k) {
        const auto& config = design.configs[k];
        ConfigData entry(config.input_permutation, config.input,
                         CountTable(enumerate_outcomes(config.n_photons(), config.n_modes()),
                                    std::vector<std::int64_t>(
                                        static_cast<std::size_t>(outcome_count(
                                            config.n_photons(), config.n_modes())),
                                        0)));
        models.push_back(model_pmf(entry, truth));
        full_data.push_back(std::move(entry));
    }

    std::vector<ConvergencePoint> out;
    for (const std::int64_t n : checkpoints) {
        std::vector<ConfigData> data;
        for (std::size_t k = 0; k < streams.size(); ++k) {
            data.emplace_back(design.configs[k].input_permutation, design.configs[k].input,
                              counts_from_stream(models[k], streams[k], n));
        }
        FullParameters at = truth;
        if (mode == ConvergenceMode::refit) {
            at = mle_fit(data, truth, fit_options).estimate;
        }
        ConvergencePoint point;
        point.n_per_config = n;
        point.observed = inverse_metrics(observed_fim(data, at));
        const double total = k_configs * static_cast<double>(n);
        point.hom_reference = inverse_metrics(
            FisherMatrix(total * per_sample_hom.entries, per_sample_hom.parameter_labels));
        point.ideal_reference = inverse_metrics(
            FisherMatrix(total * per_sample_ideal.entries, per_sample_ideal.parameter_labels));
        out.push_back(point);
    }
    return out;
}

}  // namespace phc
