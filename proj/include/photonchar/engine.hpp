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

#ifndef PHOTONCHAR_ENGINE_HPP
#define PHOTONCHAR_ENGINE_HPP

#include <cstdint>
#include <vector>

#include "photonchar/core.hpp"

namespace phc {

/// Photon count guard for the multipermanent pmf.
inline constexpr int kPmfMaxPhotons = 8;
/// Photon count guard for the Fock-space oracle.
inline constexpr int kOracleMaxPhotons = 5;

/// Concrete internal-state coordinates realizing a distinguishability
/// matrix: columns are the photons' internal wave functions in an
/// orthonormal internal basis, so vectors^dag * vectors reproduces the
/// Gram matrix. Cholesky when the matrix is definite, eigendecomposition
/// with an eigenvalue floor at zero otherwise (singular Gram matrices at
/// |overlap| = 1 are required boundary cases).
struct InternalBasisDecomposition {
    CMatrix vectors;

    static InternalBasisDecomposition from(const DistinguishabilityMatrix& s);
};

/// Output distribution of partially distinguishable photons:
///
///   P(s) = (1/prod_i r_i! s_i!) sum_sigma [prod_j S(sigma(j), j)]
///          perm(M o M*_sigma),
///
/// with M = U restricted to rows d(r) and columns d(s) and M_sigma the
/// row-permuted M. The S-product pairs indices as S(sigma(j), j); the
/// transposed pairing disagrees with the Fock-space oracle for complex
/// Gram matrices (see fock_oracle_pmf, which fixes the convention).
///
/// Each probability must be real within a 1e-9 relative imaginary residue;
/// values in [-1e-12, 0) are clipped to zero and anything lower is a
/// PhysicsError, distinguishing float noise from implementation bugs.
Pmf pmf(const ScatteringMatrix& u, const OccupationList& input,
        const DistinguishabilityMatrix& s_matrix);

/// Independent brute-force check of pmf(): realizes the internal states
/// via InternalBasisDecomposition, evolves each photon's creation operator
/// over the spatial (x) internal mode space under U (x) I, expands the
/// product state in the full Fock basis, and marginalizes over internal
/// outcomes. Shares no code with the permanent path.
Pmf fock_oracle_pmf(const ScatteringMatrix& u, const OccupationList& input,
                    const DistinguishabilityMatrix& s_matrix);

/// Multinomial draw of n_samples outcomes; deterministic for a fixed seed
/// (see rng.hpp for the reproducibility contract).
CountTable sample(const Pmf& p, std::int64_t n_samples, std::uint64_t seed);

/// As sample() but keeps the chronological outcome-index sequence.
std::vector<int> sample_stream(const Pmf& p, std::int64_t n_samples, std::uint64_t seed);

/// Histogram of the first `n` entries of a stream.
CountTable counts_from_stream(const Pmf& p, const std::vector<int>& stream, std::int64_t n);

/// (1/2) sum_s |p(s) - q(s)| over identical outcome sets.
double total_variation_distance(const Pmf& p, const Pmf& q);

/// Empirical-vs-model total variation distance.
double empirical_tvd(const CountTable& counts, const Pmf& model);

/// Two-outcome coarse-graining of a two-photon pmf into bunched and
/// anti-bunched events with respect to the beamsplitter on modes
/// (mode_a, mode_b) = (a, a+1): output modes {0..a} descend from the first
/// arm and {a+1..N-1} from the second (later couplers only spread the
/// second arm downward). Anti-bunched means one photon in each region.
struct BunchingPmf {
    double anti_bunched = 0.0;
    double bunched = 0.0;
};

BunchingPmf coarse_grain_bunching(const Pmf& p, int mode_a, int mode_b);

}  // namespace phc

#endif
