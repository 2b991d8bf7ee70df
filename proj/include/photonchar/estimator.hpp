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

#ifndef PHOTONCHAR_ESTIMATOR_HPP
#define PHOTONCHAR_ESTIMATOR_HPP

#include <cstdint>
#include <vector>

#include "photonchar/core.hpp"
#include "photonchar/fisher.hpp"

namespace phc {

/// The eight-parameter model fitted to data: the three overlap magnitudes,
/// the triad phase, and the mesh (t1, t2, t3, alpha). All configurations
/// of an experiment share one parameter set; they differ only by their
/// input permutations.
struct FullParameters {
    OverlapParameters overlaps;
    MeshParameters mesh;

    FullParameters() = default;
    FullParameters(OverlapParameters overlaps_, MeshParameters mesh_);

    /// Order: x12, x13, x23, triad_phase, t1, t2, t3, alpha.
    std::array<double, 8> to_array() const;
    static FullParameters from_array(const std::array<double, 8>& a);
};

/// Counts from one configuration: the input permutation that produced
/// them, the input occupation, and the observed counts in canonical
/// outcome order.
struct ConfigData {
    std::vector<int> input_permutation;
    OccupationList input;
    CountTable counts;

    ConfigData(std::vector<int> perm, OccupationList input_, CountTable counts_);
};

/// Model pmf of one configuration at the given parameters (negative
/// residues clamped; used by the likelihood machinery, which must stay
/// finite while an optimizer explores the PSD boundary).
Pmf model_pmf(const ConfigData& data, const FullParameters& params);

/// sum_k sum_s counts_k(s) log P_k(s; params). Outcomes with counts but
/// model probability below 1e-300 yield -infinity.
double log_likelihood(const std::vector<ConfigData>& data, const FullParameters& params);

struct FitOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
    int nm_max_iterations = 6000;
};

struct FitResult {
    FullParameters estimate;
    double log_likelihood = 0.0;
    FisherMatrix observed_fim;
    bool converged = false;
    std::vector<double> tvd_per_config;
    /// Condition number of the observed information over the four-axis set
    /// (magnitudes + triad phase); large values signal a poorly identified
    /// phase.
    double identifiability_condition = 0.0;
};

/// Maximum-likelihood fit of all eight parameters under box constraints
/// with a PSD barrier (weight 1e6 beyond a -1e-9 smallest-eigenvalue
/// slack). Multi-start Nelder-Mead: restart 0 from `init`, later restarts
/// from seeded draws. Photon relabelings compensated by mesh changes form
/// equivalent optima, so candidates within a few nats of the best
/// likelihood count as ties and the one nearest `init` (the experiment as
/// programmed) is reported. Deterministic per seed.
FitResult mle_fit(const std::vector<ConfigData>& data, const FullParameters& init,
                  const FitOptions& options = {});

/// Observed Fisher information: the negative Hessian of the total
/// log-likelihood over the three overlap magnitudes at params_hat (other
/// parameters held fixed), by central finite differences with steps that
/// shrink near the [0,1] bounds and switch to one-sided at a bound.
/// The result is symmetrized; indefiniteness is reported through *indefinite
/// when provided.
FisherMatrix observed_fim(const std::vector<ConfigData>& data, const FullParameters& params_hat,
                          double step = 1e-4, bool* indefinite = nullptr);

enum class ConvergenceMode {
    hold_truth,  ///< evaluate the observed information at the true parameters
    refit,       ///< re-estimate parameters at every checkpoint
};

struct ConvergencePoint {
    std::int64_t n_per_config = 0;
    InverseMetrics observed;
    InverseMetrics hom_reference;    ///< noiseless pairwise baseline at n_total samples
    InverseMetrics ideal_reference;  ///< noiseless design information at n_total samples
};

/// Observed-information trajectory along chronologically ordered sample
/// streams (one stream of canonical outcome indices per configuration).
/// At each checkpoint the observed information of the truncated data is
/// inverted and compared against the noiseless references scaled by the
/// total sample count. Checkpoints are per-config sample counts and must
/// increase. The design's configurations must share the truth mesh.
std::vector<ConvergencePoint> convergence_study(const ExperimentDesign& design,
                                                const FullParameters& truth,
                                                const std::vector<std::vector<int>>& streams,
                                                const std::vector<std::int64_t>& checkpoints,
                                                ConvergenceMode mode, const FitOptions& fit_options = {});

}  // namespace phc

#endif
