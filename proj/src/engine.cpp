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

#include "photonchar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "photonchar/permanent.hpp"
#include "photonchar/rng.hpp"

namespace phc {

namespace {

constexpr double kNegativeClip = -1e-12;
constexpr double kImagResidueTolerance = 1e-9;

double factorial_product(const OccupationList& occ) {
    double prod = 1.0;
    for (int m = 0; m < occ.n_modes(); ++m) {
        for (int k = 2; k <= occ[m]; ++k) prod *= k;
    }
    return prod;
}

std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

void check_pmf_arguments(const ScatteringMatrix& u, const OccupationList& input, const CMatrix& s) {
    if (input.n_modes() != u.dim()) {
        throw InvalidArgument("input occupation list does not match the scattering dimension");
    }
    if (s.rows() != s.cols() || s.rows() != input.n_photons()) {
        throw InvalidArgument("distinguishability matrix dimension must equal the photon count");
    }
}

}  // namespace

namespace detail {

// Shared by pmf() and the likelihood path. In lenient mode negative
// residues of any size are clamped instead of raising and the result is
// renormalized, so an optimizer probing the PSD boundary sees a finite
// objective.
Pmf pmf_raw(const ScatteringMatrix& u, const OccupationList& input, const CMatrix& s, bool strict) {
    check_pmf_arguments(u, input, s);
    const int n = input.n_photons();
    if (n > kPmfMaxPhotons) {
        throw LimitError("pmf photon count exceeds guard of " + std::to_string(kPmfMaxPhotons));
    }
    const auto outcomes = enumerate_outcomes(n, u.dim());
    const auto d_r = occupation_to_assignment(input);
    const auto perms = all_permutations(n);
    const auto& mat = u.entries();
    const double r_factorials = factorial_product(input);

    // Permutation prefactors prod_j S(sigma(j), j) depend only on sigma.
    std::vector<Complex> prefactors(perms.size());
    for (std::size_t g = 0; g < perms.size(); ++g) {
        Complex pref(1.0, 0.0);
        for (int j = 0; j < n; ++j) pref *= s(perms[g][static_cast<std::size_t>(j)], j);
        prefactors[g] = pref;
    }

    std::vector<double> probabilities(outcomes.size());
    CMatrix m(n, n);
    CMatrix hadamard(n, n);
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
        const auto d_s = occupation_to_assignment(outcomes[o]);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) m(a, b) = mat(d_r[a], d_s[b]);
        }
        Complex acc(0.0, 0.0);
        for (std::size_t g = 0; g < perms.size(); ++g) {
            if (prefactors[g] == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) {
                const int pj = perms[g][static_cast<std::size_t>(j)];
                for (int b = 0; b < n; ++b) hadamard(j, b) = m(j, b) * std::conj(m(pj, b));
            }
            acc += prefactors[g] * permanent(hadamard);
        }
        const double norm = r_factorials * factorial_product(outcomes[o]);
        const Complex value = acc / norm;
        if (strict && std::abs(value.imag()) > kImagResidueTolerance * std::max(1.0, std::abs(value.real()))) {
            throw PhysicsError("pmf value has a non-negligible imaginary residue");
        }
        double p = value.real();
        if (p < 0.0) {
            if (strict && p < kNegativeClip) {
                throw PhysicsError("pmf value " + std::to_string(p) +
                                   " below the negativity tolerance");
            }
            p = 0.0;
        }
        probabilities[o] = p;
    }
    if (!strict) {
        // The likelihood path tolerates slightly unnormalized iterates.
        double sum = 0.0;
        for (double p : probabilities) sum += p;
        if (sum <= 0.0) throw PhysicsError("pmf vanished entirely");
        for (double& p : probabilities) p /= sum;
    }
    return Pmf(outcomes, std::move(probabilities));
}

}  // namespace detail

Pmf pmf(const ScatteringMatrix& u, const OccupationList& input,
        const DistinguishabilityMatrix& s_matrix) {
    return detail::pmf_raw(u, input, s_matrix.entries(), /*strict=*/true);
}

InternalBasisDecomposition InternalBasisDecomposition::from(const DistinguishabilityMatrix& s) {
    const int n = s.dim();
    Eigen::LLT<CMatrix> llt(s.entries());
    CMatrix vectors;
    if (llt.info() == Eigen::Success) {
        // S = L L^dag, columns of L^dag realize the Gram matrix.
        vectors = llt.matrixL().toDenseMatrix().adjoint();
    } else {
        // Singular Gram matrices (|overlap| = 1): eigendecomposition with
        // an eigenvalue floor at zero.
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(s.entries());
        if (eig.info() != Eigen::Success) {
            throw PhysicsError("distinguishability matrix decomposition failed");
        }
        Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
        vectors = vals.cwiseSqrt().asDiagonal().toDenseMatrix().cast<Complex>() *
                  eig.eigenvectors().adjoint();
    }
    const double residual = ((vectors.adjoint() * vectors) - s.entries()).cwiseAbs().maxCoeff();
    if (residual > 1e-10) {
        throw PhysicsError("internal-basis decomposition residual too large");
    }
    return InternalBasisDecomposition{std::move(vectors)};
}

Pmf fock_oracle_pmf(const ScatteringMatrix& u, const OccupationList& input,
                    const DistinguishabilityMatrix& s_matrix) {
    check_pmf_arguments(u, input, s_matrix.entries());
    const int n = input.n_photons();
    const int n_modes = u.dim();
    if (n > kOracleMaxPhotons) {
        throw LimitError("oracle photon count exceeds guard of " +
                         std::to_string(kOracleMaxPhotons));
    }
    const auto decomposition = InternalBasisDecomposition::from(s_matrix);
    const auto d_r = occupation_to_assignment(input);

    // Combined mode index c = spatial * n + internal. Photon j contributes
    // the operator sum_c w_j[c] a^dag_c with w_j[(m2,k)] = U(d_r[j], m2) *
    // V(k, j); the product state is expanded photon by photon.
    using FockState = std::map<std::vector<int>, Complex>;
    FockState state;
    state[std::vector<int>(static_cast<std::size_t>(n_modes * n), 0)] = Complex(1.0, 0.0);
    for (int j = 0; j < n; ++j) {
        FockState next;
        for (const auto& [occ, amp] : state) {
            for (int m2 = 0; m2 < n_modes; ++m2) {
                const Complex transfer = u.entries()(d_r[j], m2);
                if (transfer == Complex(0.0, 0.0)) continue;
                for (int k = 0; k < n; ++k) {
                    const Complex w = transfer * decomposition.vectors(k, j);
                    if (w == Complex(0.0, 0.0)) continue;
                    std::vector<int> bumped = occ;
                    ++bumped[static_cast<std::size_t>(m2 * n + k)];
                    next[bumped] += amp * w;
                }
            }
        }
        state = std::move(next);
    }

    // P(o) = |coefficient|^2 * prod_c o_c!, marginalized over the internal
    // index, normalized by the input mode factorials.
    const auto outcomes = enumerate_outcomes(n, n_modes);
    std::vector<double> probabilities(outcomes.size(), 0.0);
    const double r_factorials = factorial_product(input);
    for (const auto& [occ, amp] : state) {
        double occ_factorial = 1.0;
        for (int c : occ) {
            for (int k = 2; k <= c; ++k) occ_factorial *= k;
        }
        std::vector<int> spatial(static_cast<std::size_t>(n_modes), 0);
        for (int m2 = 0; m2 < n_modes; ++m2) {
            int total = 0;
            for (int k = 0; k < n; ++k) total += occ[static_cast<std::size_t>(m2 * n + k)];
            spatial[static_cast<std::size_t>(m2)] = total;
        }
        const int idx = outcome_index(OccupationList(spatial));
        probabilities[static_cast<std::size_t>(idx)] += std::norm(amp) * occ_factorial;
    }
    for (double& p : probabilities) p /= r_factorials;
    return Pmf(outcomes, std::move(probabilities));
}

CountTable sample(const Pmf& p, std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 0) throw InvalidArgument("sample count must be non-negative");
    std::vector<std::int64_t> counts(p.outcomes.size(), 0);
    for (int idx : sample_stream(p, n_samples, seed)) ++counts[static_cast<std::size_t>(idx)];
    return CountTable(p.outcomes, std::move(counts));
}

std::vector<int> sample_stream(const Pmf& p, std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 0) throw InvalidArgument("sample count must be non-negative");
    std::vector<double> cdf(p.probabilities.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
        acc += p.probabilities[i];
        cdf[i] = acc;
    }
    cdf.back() = std::max(cdf.back(), 1.0);
    Rng rng(seed);
    std::vector<int> stream;
    stream.reserve(static_cast<std::size_t>(n_samples));
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double x = rng.uniform01();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        stream.push_back(static_cast<int>(std::distance(cdf.begin(), it)));
    }
    return stream;
}

CountTable counts_from_stream(const Pmf& p, const std::vector<int>& stream, std::int64_t n) {
    if (n < 0 || n > static_cast<std::int64_t>(stream.size())) {
        throw InvalidArgument("stream prefix length out of range");
    }
    std::vector<std::int64_t> counts(p.outcomes.size(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const int idx = stream[static_cast<std::size_t>(i)];
        if (idx < 0 || idx >= p.n_outcomes()) throw InvalidArgument("stream entry out of range");
        ++counts[static_cast<std::size_t>(idx)];
    }
    return CountTable(p.outcomes, std::move(counts));
}

double total_variation_distance(const Pmf& p, const Pmf& q) {
    if (p.outcomes.size() != q.outcomes.size()) {
        throw InvalidArgument("total variation distance requires identical outcome sets");
    }
    for (std::size_t i = 0; i < p.outcomes.size(); ++i) {
        if (!(p.outcomes[i] == q.outcomes[i])) {
            throw InvalidArgument("total variation distance requires identical outcome sets");
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
        acc += std::abs(p.probabilities[i] - q.probabilities[i]);
    }
    return acc / 2.0;
}

double empirical_tvd(const CountTable& counts, const Pmf& model) {
    if (counts.n_outcomes() != model.n_outcomes()) {
        throw InvalidArgument("count table does not match the model outcome set");
    }
    if (counts.total == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < counts.counts.size(); ++i) {
        const double empirical =
            static_cast<double>(counts.counts[i]) / static_cast<double>(counts.total);
        acc += std::abs(empirical - model.probabilities[i]);
    }
    return acc / 2.0;
}

BunchingPmf coarse_grain_bunching(const Pmf& p, int mode_a, int mode_b) {
    if (p.n_photons() != 2) {
        throw InvalidArgument("bunching coarse-graining applies to two-photon pmfs");
    }
    if (mode_b != mode_a + 1 || mode_a < 0 || mode_b >= p.n_modes()) {
        throw InvalidArgument("beamsplitter modes must be an adjacent in-range pair");
    }
    BunchingPmf out;
    for (std::size_t i = 0; i < p.outcomes.size(); ++i) {
        const auto& occ = p.outcomes[i];
        int first_region = 0;
        for (int m = 0; m <= mode_a; ++m) first_region += occ[m];
        if (first_region == 1) {
            out.anti_bunched += p.probabilities[i];
        } else {
            out.bunched += p.probabilities[i];
        }
    }
    return out;
}

}  // namespace phc
