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

#include "photonchar/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "photonchar/engine.hpp"
#include "photonchar/interferometer.hpp"
#include "photonchar/optim.hpp"
#include "photonchar/rng.hpp"

namespace phc {

namespace {

constexpr double kProbabilityFloor = 1e-14;
constexpr double kDerivativeFloor = 1e-12;

// Gram matrix over n photons from the C(n,2) pairwise magnitudes in
// lexicographic pair order, all phases zero; for n = 3 the triad phase is
// applied to the (1,3) pair.
DistinguishabilityMatrix gram_from_magnitudes(int n, const std::vector<double>& mags,
                                              double triad_phase) {
    CMatrix s = CMatrix::Identity(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Complex value(mags.at(idx), 0.0);
            if (n == 3 && i == 0 && j == 2) value = std::polar(mags.at(idx), triad_phase);
            s(i, j) = value;
            s(j, i) = std::conj(value);
            ++idx;
        }
    }
    return DistinguishabilityMatrix(std::move(s));
}

struct FimProblem {
    ScatteringMatrix unitary;
    OccupationList input;
    std::vector<double> magnitudes;  // the differentiation axes
    double triad_phase = 0.0;
    std::vector<std::string> labels;
};

FimProblem make_problem(const ExperimentConfig& config, const std::vector<double>& magnitudes,
                        double triad_phase, std::vector<std::string> labels) {
    const int n = config.n_photons();
    if (static_cast<int>(magnitudes.size()) != n * (n - 1) / 2) {
        throw InvalidArgument("magnitude count must equal the photon-pair count");
    }
    for (double x : magnitudes) {
        if (!(x > 0.0 && x < 1.0)) {
            throw InvalidArgument("Fisher information requires magnitudes strictly inside (0, 1)");
        }
    }
    return FimProblem{config_unitary(config), config.input, magnitudes, triad_phase,
                      std::move(labels)};
}

std::vector<double> problem_pmf(const FimProblem& problem, const std::vector<double>& mags) {
    const auto s = gram_from_magnitudes(problem.input.n_photons(), mags, problem.triad_phase);
    return pmf(problem.unitary, problem.input, s).probabilities;
}

// Central-difference steps that keep every stencil point inside (0, 1).
std::vector<double> interior_steps(const std::vector<double>& mags, double step) {
    std::vector<double> h(mags.size());
    for (std::size_t i = 0; i < mags.size(); ++i) {
        h[i] = std::min({step, mags[i] / 2.0, (1.0 - mags[i]) / 2.0});
    }
    return h;
}

RMatrix fim_score_entries(const FimProblem& problem, double step, FimStats* stats) {
    const int p = static_cast<int>(problem.magnitudes.size());
    const auto p0 = problem_pmf(problem, problem.magnitudes);
    const auto h = interior_steps(problem.magnitudes, step);
    std::vector<std::vector<double>> dp(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        auto plus = problem.magnitudes;
        auto minus = problem.magnitudes;
        plus[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(i)];
        minus[static_cast<std::size_t>(i)] -= h[static_cast<std::size_t>(i)];
        const auto pp = problem_pmf(problem, plus);
        const auto pm = problem_pmf(problem, minus);
        auto& grad = dp[static_cast<std::size_t>(i)];
        grad.resize(p0.size());
        for (std::size_t s = 0; s < p0.size(); ++s) {
            grad[s] = (pp[s] - pm[s]) / (2.0 * h[static_cast<std::size_t>(i)]);
        }
    }
    RMatrix f = RMatrix::Zero(p, p);
    for (std::size_t s = 0; s < p0.size(); ++s) {
        if (p0[s] <= kProbabilityFloor) {
            double max_grad = 0.0;
            for (int i = 0; i < p; ++i) {
                max_grad = std::max(max_grad, std::abs(dp[static_cast<std::size_t>(i)][s]));
            }
            if (max_grad > kDerivativeFloor && stats != nullptr) ++stats->underflow_warnings;
            continue;  // P = 0 with zero derivative contributes nothing.
        }
        for (int i = 0; i < p; ++i) {
            for (int j = i; j < p; ++j) {
                const double term =
                    dp[static_cast<std::size_t>(i)][s] * dp[static_cast<std::size_t>(j)][s] / p0[s];
                f(i, j) += term;
                if (i != j) f(j, i) += term;
            }
        }
    }
    return f;
}

RMatrix fim_hessian_entries(const FimProblem& problem, double step, FimStats* stats) {
    const int p = static_cast<int>(problem.magnitudes.size());
    const auto p0 = problem_pmf(problem, problem.magnitudes);
    const auto h = interior_steps(problem.magnitudes, step);
    const std::size_t n_outcomes = p0.size();

    auto log_pmf_at = [&](const std::vector<double>& mags) {
        auto probs = problem_pmf(problem, mags);
        std::vector<double> lp(probs.size());
        for (std::size_t s = 0; s < probs.size(); ++s) {
            lp[s] = probs[s] > 0.0 ? std::log(probs[s]) : -std::numeric_limits<double>::infinity();
        }
        return lp;
    };

    const auto lp0 = log_pmf_at(problem.magnitudes);
    std::vector<std::vector<double>> lp_plus(static_cast<std::size_t>(p)),
        lp_minus(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        auto plus = problem.magnitudes;
        auto minus = problem.magnitudes;
        plus[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(i)];
        minus[static_cast<std::size_t>(i)] -= h[static_cast<std::size_t>(i)];
        lp_plus[static_cast<std::size_t>(i)] = log_pmf_at(plus);
        lp_minus[static_cast<std::size_t>(i)] = log_pmf_at(minus);
    }

    std::vector<bool> usable(n_outcomes);
    for (std::size_t s = 0; s < n_outcomes; ++s) {
        bool finite = std::isfinite(lp0[s]) && p0[s] > kProbabilityFloor;
        for (int i = 0; i < p && finite; ++i) {
            finite = std::isfinite(lp_plus[static_cast<std::size_t>(i)][s]) &&
                     std::isfinite(lp_minus[static_cast<std::size_t>(i)][s]);
        }
        usable[s] = finite;
        if (!finite && stats != nullptr) {
            double max_slope = 0.0;
            for (int i = 0; i < p; ++i) {
                const double ps_plus = std::exp(lp_plus[static_cast<std::size_t>(i)][s]);
                const double ps_minus = std::exp(lp_minus[static_cast<std::size_t>(i)][s]);
                max_slope = std::max(max_slope, std::abs(ps_plus - ps_minus) /
                                                    (2.0 * h[static_cast<std::size_t>(i)]));
            }
            if (max_slope > kDerivativeFloor) ++stats->underflow_warnings;
        }
    }

    RMatrix f = RMatrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        const double hi = h[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < n_outcomes; ++s) {
            if (!usable[s]) continue;
            const double second = (lp_plus[static_cast<std::size_t>(i)][s] - 2.0 * lp0[s] +
                                   lp_minus[static_cast<std::size_t>(i)][s]) /
                                  (hi * hi);
            f(i, i) -= second * p0[s];
        }
        for (int j = i + 1; j < p; ++j) {
            const double hj = h[static_cast<std::size_t>(j)];
            auto pp = problem.magnitudes;
            auto pm = problem.magnitudes;
            auto mp = problem.magnitudes;
            auto mm = problem.magnitudes;
            pp[static_cast<std::size_t>(i)] += hi;
            pp[static_cast<std::size_t>(j)] += hj;
            pm[static_cast<std::size_t>(i)] += hi;
            pm[static_cast<std::size_t>(j)] -= hj;
            mp[static_cast<std::size_t>(i)] -= hi;
            mp[static_cast<std::size_t>(j)] += hj;
            mm[static_cast<std::size_t>(i)] -= hi;
            mm[static_cast<std::size_t>(j)] -= hj;
            const auto lpp = log_pmf_at(pp);
            const auto lpm = log_pmf_at(pm);
            const auto lmp = log_pmf_at(mp);
            const auto lmm = log_pmf_at(mm);
            double acc = 0.0;
            for (std::size_t s = 0; s < n_outcomes; ++s) {
                if (!usable[s]) continue;
                if (!std::isfinite(lpp[s]) || !std::isfinite(lpm[s]) || !std::isfinite(lmp[s]) ||
                    !std::isfinite(lmm[s])) {
                    continue;
                }
                const double cross = (lpp[s] - lpm[s] - lmp[s] + lmm[s]) / (4.0 * hi * hj);
                acc -= cross * p0[s];
            }
            f(i, j) += acc;
            f(j, i) += acc;
        }
    }
    return f;
}

RMatrix fim_entries(const FimProblem& problem, const FimOptions& options, FimStats* stats) {
    auto evaluate = [&](double step) {
        return options.method == FimMethod::score ? fim_score_entries(problem, step, stats)
                                                  : fim_hessian_entries(problem, step, stats);
    };
    if (!options.richardson) return evaluate(options.step);
    const RMatrix coarse = evaluate(options.step);
    const RMatrix fine = evaluate(options.step / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

std::vector<double> theta_magnitudes(const OverlapParameters& theta) {
    return {theta.x12, theta.x13, theta.x23};
}

FisherMatrix summed_fim_general(const ExperimentDesign& design,
                                const std::vector<double>& magnitudes, double triad_phase,
                                const FimOptions& options, FimStats* stats) {
    RMatrix total;
    std::vector<std::string> labels = pair_magnitude_labels(design.configs.front().n_photons());
    for (std::size_t k = 0; k < design.configs.size(); ++k) {
        const auto problem = make_problem(design.configs[k], magnitudes, triad_phase, labels);
        const RMatrix f = fim_entries(problem, options, stats);
        if (k == 0) {
            total = design.weights[k] * f;
        } else {
            total += design.weights[k] * f;
        }
    }
    return FisherMatrix(std::move(total), std::move(labels));
}

}  // namespace

FisherMatrix fim(const ExperimentConfig& config, const OverlapParameters& theta,
                 const FimOptions& options, FimStats* stats) {
    if (config.n_photons() != 3) {
        throw InvalidArgument("the overlap-parameter Fisher matrix is for 3-photon configurations");
    }
    const auto problem = make_problem(config, theta_magnitudes(theta), theta.triad_phase,
                                      overlap_magnitude_labels());
    return FisherMatrix(fim_entries(problem, options, stats), overlap_magnitude_labels());
}

FisherMatrix fim_magnitudes(const ExperimentConfig& config, const std::vector<double>& magnitudes,
                            const FimOptions& options, FimStats* stats) {
    const auto labels = pair_magnitude_labels(config.n_photons());
    const auto problem = make_problem(config, magnitudes, 0.0, labels);
    return FisherMatrix(fim_entries(problem, options, stats), labels);
}

FisherMatrix summed_fim(const ExperimentDesign& design, const OverlapParameters& theta,
                        const FimOptions& options, FimStats* stats) {
    for (const auto& config : design.configs) {
        if (config.n_photons() != 3) {
            throw InvalidArgument("summed_fim over overlap parameters needs 3-photon configs");
        }
    }
    return summed_fim_general(design, theta_magnitudes(theta), theta.triad_phase, options, stats);
}

double d_optimality(const FisherMatrix& f) { return f.entries.determinant(); }

bool InverseMetrics::finite() const {
    return std::isfinite(det_inv) && std::isfinite(trace_inv) && std::isfinite(max_eig_inv);
}

InverseMetrics inverse_metrics(const FisherMatrix& f) {
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(f.entries);
    const auto& eigenvalues = solver.eigenvalues();
    const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
    InverseMetrics out;
    if (eigenvalues.minCoeff() <= 1e-14 * scale) {
        const double inf = std::numeric_limits<double>::infinity();
        return InverseMetrics{inf, inf, inf};
    }
    out.det_inv = 1.0;
    out.trace_inv = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        out.det_inv /= eigenvalues[i];
        out.trace_inv += 1.0 / eigenvalues[i];
    }
    out.max_eig_inv = 1.0 / eigenvalues.minCoeff();
    return out;
}

double hom_pair_information(double x) {
    if (!(x >= 0.0 && x < 1.0)) {
        throw PhysicsError("pairwise information diverges at |overlap| = 1");
    }
    return 4.0 * x * x / (1.0 - x * x * x * x);
}

FisherMatrix hom_baseline_fim(const OverlapParameters& theta) {
    RMatrix entries = RMatrix::Zero(3, 3);
    const auto mags = theta_magnitudes(theta);
    for (int i = 0; i < 3; ++i) {
        entries(i, i) = hom_pair_information(mags[static_cast<std::size_t>(i)]) / 3.0;
    }
    return FisherMatrix(std::move(entries), overlap_magnitude_labels());
}

FisherMatrix hom_baseline_fim_magnitudes(const std::vector<double>& magnitudes) {
    const int pairs = static_cast<int>(magnitudes.size());
    // pairs = C(n,2) for some integer n
    int n = 2;
    while (n * (n - 1) / 2 < pairs) ++n;
    if (n * (n - 1) / 2 != pairs) {
        throw InvalidArgument("magnitude count is not a photon-pair count");
    }
    RMatrix entries = RMatrix::Zero(pairs, pairs);
    for (int i = 0; i < pairs; ++i) {
        entries(i, i) =
            hom_pair_information(magnitudes[static_cast<std::size_t>(i)]) / static_cast<double>(pairs);
    }
    return FisherMatrix(std::move(entries), pair_magnitude_labels(n));
}

namespace {

ExperimentDesign design_from_vector(const RVector& v, int n_configs) {
    std::vector<ExperimentConfig> configs;
    OccupationList input({1, 1, 1});
    for (int k = 0; k < n_configs; ++k) {
        const double t1 = std::clamp(v[4 * k + 0], 0.0, 1.0);
        const double t2 = std::clamp(v[4 * k + 1], 0.0, 1.0);
        const double t3 = std::clamp(v[4 * k + 2], 0.0, 1.0);
        const double alpha = v[4 * k + 3];
        const auto& perm = kCyclicPermutations3[static_cast<std::size_t>(k % 3)];
        configs.emplace_back(MeshParameters({t1, t2, t3}, {alpha}), input,
                             std::vector<int>(perm.begin(), perm.end()));
    }
    return ExperimentDesign(std::move(configs), {});
}

}  // namespace

double optimal_second_ratio(double x, int grid_points) {
    if (!(x > 0.0 && x < 1.0)) {
        throw InvalidArgument("optimal_second_ratio needs an interior overlap");
    }
    if (grid_points < 5) throw InvalidArgument("grid too coarse");
    const OverlapParameters theta = OverlapParameters::equal(x);
    auto objective = [&](double q) {
        return d_optimality(summed_fim(ExperimentDesign::permuted_fig1(q), theta));
    };
    // The objective is mirror-symmetric about q = 1/2 (the complementary
    // circuit relabels two output modes), so only (0, 1/2] is searched.
    const double lo = 0.02;
    const double hi = 0.5;
    double best_q = lo;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        const double q = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
        const double value = objective(q);
        if (value > best_value) {
            best_value = value;
            best_q = q;
        }
    }
    const double width = (hi - lo) / (grid_points - 1);
    const double a = std::max(lo, best_q - width);
    const double b = std::min(hi, best_q + width);
    return golden_section_max(objective, a, b, 1e-10);
}

DesignResult optimize_design(const OverlapParameters& theta, int n_configs, int restarts,
                             std::uint64_t seed) {
    if (n_configs != 3) {
        throw InvalidArgument("the design search is defined for three configurations");
    }
    if (restarts < 1) throw InvalidArgument("at least one restart is required");
    for (double x : theta_magnitudes(theta)) {
        if (!(x > 0.0 && x < 1.0)) {
            throw InvalidArgument("design optimization needs interior overlap magnitudes");
        }
    }

    const int dim = 4 * n_configs;
    RVector lower(dim), upper(dim);
    for (int k = 0; k < n_configs; ++k) {
        for (int j = 0; j < 3; ++j) {
            lower[4 * k + j] = 0.01;  // keeps the search away from ratio singularities
            upper[4 * k + j] = 0.99;
        }
        lower[4 * k + 3] = -M_PI;
        upper[4 * k + 3] = M_PI;
    }

    const FimOptions fim_options{FimMethod::score, 1e-4, false};
    auto objective = [&](const RVector& v) {
        return -d_optimality(summed_fim(design_from_vector(v, n_configs), theta, fim_options));
    };

    // Informed first start: the permuted protocol design at the 1-D optimal
    // second splitting ratio; later starts are independent seeded draws.
    const double mean_mag = (theta.x12 + theta.x13 + theta.x23) / 3.0;
    const double q_star = optimal_second_ratio(mean_mag);
    std::vector<RVector> starts(static_cast<std::size_t>(restarts));
    {
        RVector informed(dim);
        for (int k = 0; k < n_configs; ++k) {
            informed[4 * k + 0] = 0.5;
            informed[4 * k + 1] = 1.0 - q_star;
            informed[4 * k + 2] = 0.01;
            informed[4 * k + 3] = 0.0;
        }
        starts[0] = informed;
    }
    for (int r = 1; r < restarts; ++r) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(r)));
        RVector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = rng.uniform(lower[i], upper[i]);
        starts[static_cast<std::size_t>(r)] = v;
    }

    // The det objective is steep near ratio boundaries (couplings scale as
    // sqrt(t)), so each restart runs a wide pass plus a narrow re-seeded
    // pass inside the guarded box, and every candidate is then polished on
    // the full [0,1] box; the best polished design wins.
    RVector lower_full = lower;
    RVector upper_full = upper;
    for (int k = 0; k < n_configs; ++k) {
        for (int j = 0; j < 3; ++j) {
            lower_full[4 * k + j] = 0.0;
            upper_full[4 * k + j] = 1.0;
        }
    }
    NelderMeadOptions wide;
    wide.max_iterations = 4000;
    NelderMeadOptions narrow;
    narrow.max_iterations = 3000;
    narrow.initial_scale = 0.02;
    NelderMeadOptions polish_options;
    polish_options.max_iterations = 8000;
    polish_options.x_tolerance = 1e-8;
    polish_options.f_tolerance = 1e-12;
    polish_options.initial_scale = 0.01;

    std::vector<NelderMeadResult> results(static_cast<std::size_t>(restarts));
    parallel_for(restarts, [&](int r) {
        auto stage1 =
            nelder_mead(objective, starts[static_cast<std::size_t>(r)], lower, upper, wide);
        auto stage2 = nelder_mead(objective, stage1.x, lower, upper, narrow);
        int evaluations = stage1.evaluations + stage2.evaluations;
        // Re-seeded polish rounds on the full box until the simplex
        // collapses.
        NelderMeadResult refined = std::move(stage2);
        for (int round = 0; round < 3; ++round) {
            auto next = nelder_mead(objective, refined.x, lower_full, upper_full, polish_options);
            evaluations += next.evaluations;
            const bool done = next.converged;
            refined = std::move(next);
            if (done) break;
        }
        refined.evaluations = evaluations;
        results[static_cast<std::size_t>(r)] = std::move(refined);
    });

    // Deterministic reduction: best score, ties broken by the
    // lexicographically smallest parameter vector.
    int best = 0;
    for (int r = 1; r < restarts; ++r) {
        const auto& a = results[static_cast<std::size_t>(r)];
        const auto& b = results[static_cast<std::size_t>(best)];
        bool better = a.value < b.value;
        if (a.value == b.value) {
            for (int i = 0; i < dim; ++i) {
                if (a.x[i] != b.x[i]) {
                    better = a.x[i] < b.x[i];
                    break;
                }
            }
        }
        if (better) best = r;
    }
    // The optimum is degenerate: mirrored and relabeled copies of one
    // design score identically. When the informed candidate ties the
    // winner within optimizer resolution it is reported instead, as the
    // canonical representative of that equivalence class.
    if (best != 0 &&
        -results[0].value >= -results[static_cast<std::size_t>(best)].value * (1.0 - 1e-6)) {
        best = 0;
    }

    std::vector<std::pair<std::int64_t, double>> trace;
    {
        std::int64_t evals = 0;
        double best_so_far = std::numeric_limits<double>::infinity();
        for (int r = 0; r < restarts; ++r) {
            evals += results[static_cast<std::size_t>(r)].evaluations;
            if (results[static_cast<std::size_t>(r)].value < best_so_far) {
                best_so_far = results[static_cast<std::size_t>(r)].value;
                trace.emplace_back(evals, -best_so_far);
            }
        }
    }
    const auto& polished = results[static_cast<std::size_t>(best)];

    // Canonical form: wrap phases into (-pi, pi]; with a vanishing third
    // coupler the internal phase is pure gauge, so it is zeroed.
    RVector x = polished.x;
    for (int k = 0; k < n_configs; ++k) {
        double alpha = std::remainder(x[4 * k + 3], 2.0 * M_PI);
        if (alpha <= -M_PI) alpha += 2.0 * M_PI;
        if (x[4 * k + 2] <= 1e-6) alpha = 0.0;
        x[4 * k + 3] = alpha;
    }

    DesignResult out{design_from_vector(x, n_configs), 0.0,
                     FisherMatrix(RMatrix::Zero(3, 3), overlap_magnitude_labels()), std::move(trace),
                     polished.converged};
    out.fim = summed_fim(out.design, theta, fim_options);
    out.score = d_optimality(out.fim);
    return out;
}

std::vector<ProtocolComparison> compare_protocols(const OverlapParameters& theta,
                                                  const std::vector<ExperimentDesign>& designs,
                                                  const std::vector<std::string>& labels) {
    if (designs.empty()) throw InvalidArgument("no designs to compare");
    if (!labels.empty() && labels.size() != designs.size()) {
        throw InvalidArgument("label count must match design count");
    }
    const int n = designs.front().configs.front().n_photons();
    for (const auto& design : designs) {
        for (const auto& config : design.configs) {
            if (config.n_photons() != n) {
                throw InvalidArgument("all compared designs must share one photon count");
            }
        }
    }
    std::vector<double> magnitudes;
    double triad_phase = 0.0;
    if (n == 3) {
        magnitudes = theta_magnitudes(theta);
        triad_phase = theta.triad_phase;
    } else {
        const double mean = (theta.x12 + theta.x13 + theta.x23) / 3.0;
        magnitudes.assign(static_cast<std::size_t>(n * (n - 1) / 2), mean);
    }

    std::vector<ProtocolComparison> rows;
    for (std::size_t k = 0; k < designs.size(); ++k) {
        const auto f = summed_fim_general(designs[k], magnitudes, triad_phase, {}, nullptr);
        ProtocolComparison row;
        row.label = labels.empty() ? "design_" + std::to_string(k) : labels[k];
        row.n_photons = n;
        row.d_opt = d_optimality(f);
        row.metrics = inverse_metrics(f);
        rows.push_back(std::move(row));
    }
    const auto baseline = hom_baseline_fim_magnitudes(magnitudes);
    ProtocolComparison hom_row;
    hom_row.label = "hom_baseline";
    hom_row.n_photons = n;
    hom_row.d_opt = d_optimality(baseline);
    hom_row.metrics = inverse_metrics(baseline);
    rows.push_back(std::move(hom_row));
    return rows;
}

}  // namespace phc
