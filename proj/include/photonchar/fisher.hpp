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

#ifndef PHOTONCHAR_FISHER_HPP
#define PHOTONCHAR_FISHER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "photonchar/core.hpp"

namespace phc {

// All Fisher matrices here are per sample and range over the pairwise
// overlap magnitudes only; the triad phase is held fixed at its value in
// theta and is not an information axis.

enum class FimMethod {
    /// Central finite differences of the log-pmf Hessian, averaged over
    /// outcomes: sum_s [-d^2 log P(s)] P(s).
    hessian,
    /// Score form: sum_s (d_i P)(d_j P)/P. Equal to the Hessian form for
    /// exact pmfs and numerically better conditioned.
    score,
};

struct FimOptions {
    FimMethod method = FimMethod::score;
    /// Central-difference step; shrinks automatically near the [0,1]
    /// magnitude bounds.
    double step = 1e-4;
    /// Combine steps h and h/2 to cancel the O(h^2) truncation term.
    bool richardson = false;
};

struct FimStats {
    /// Outcomes excluded because P(s) underflowed while a derivative
    /// remained (P < 1e-14 with |dP| > 1e-12).
    int underflow_warnings = 0;
};

/// Per-sample Fisher information of one configuration over the three
/// overlap magnitudes, evaluated at theta.
FisherMatrix fim(const ExperimentConfig& config, const OverlapParameters& theta,
                 const FimOptions& options = {}, FimStats* stats = nullptr);

/// Generalized n-photon variant over the C(n,2) pairwise magnitudes
/// (lexicographic pair order, all internal phases zero).
FisherMatrix fim_magnitudes(const ExperimentConfig& config, const std::vector<double>& magnitudes,
                            const FimOptions& options = {}, FimStats* stats = nullptr);

/// Weighted per-sample information of a design: sum_k weights[k] *
/// fim(configs[k]). With equal weights and identical configs this equals
/// the information of a single configuration.
FisherMatrix summed_fim(const ExperimentDesign& design, const OverlapParameters& theta,
                        const FimOptions& options = {}, FimStats* stats = nullptr);

/// det(f).
double d_optimality(const FisherMatrix& f);

/// Scalarizations of the inverse matrix; +infinity sentinels when f is
/// singular (any eigenvalue <= 0 within tolerance).
struct InverseMetrics {
    double det_inv = 0.0;
    double trace_inv = 0.0;
    double max_eig_inv = 0.0;

    bool finite() const;
};

InverseMetrics inverse_metrics(const FisherMatrix& f);

/// Scalar per-sample information of a balanced two-photon beamsplitter
/// about the overlap magnitude x: 4x^2/(1-x^4).
double hom_pair_information(double x);

/// Per-sample information of the three pairwise balanced-beamsplitter
/// experiments under equal time allocation:
/// diag(I(x12), I(x13), I(x23))/3. Throws PhysicsError at a magnitude of
/// exactly 1 (divergent information).
FisherMatrix hom_baseline_fim(const OverlapParameters& theta);

/// n-photon parallel-pair variant: diag over the C(n,2) magnitudes with
/// weight 1/C(n,2).
FisherMatrix hom_baseline_fim_magnitudes(const std::vector<double>& magnitudes);

struct DesignResult {
    ExperimentDesign design;
    double score = 0.0;
    FisherMatrix fim;
    /// (cumulative objective evaluation count, best score so far) events.
    std::vector<std::pair<std::int64_t, double>> optimizer_trace;
    bool converged = false;
};

/// D-optimal search over 12 parameters: three configurations x
/// (t1, t2, t3, alpha), inputs fixed to one photon per mode with the three
/// cyclic input permutations assigned one per configuration slot.
/// Multi-start Nelder-Mead with ratios bounded to [0.01, 0.99] during the
/// search and a final polish on the full [0, 1] box; restart 0 starts from
/// the permuted protocol design at the 1-D optimal second ratio, the rest
/// from seeded random draws. Deterministic for a fixed seed and
/// independent of thread count.
DesignResult optimize_design(const OverlapParameters& theta, int n_configs = 3,
                             int restarts = 32, std::uint64_t seed = 0);

/// Argmax over the second splitting ratio (straight-through convention) of
/// the D-optimality of the three-permutation protocol design at equal
/// overlaps x; coarse grid then golden-section refinement. The objective
/// is symmetric under q -> 1-q (the mirrored circuit is an output
/// relabeling), so the representative in (0, 1/2] is returned.
double optimal_second_ratio(double x, int grid_points = 61);

/// One row of a protocol comparison table.
struct ProtocolComparison {
    std::string label;
    int n_photons = 0;
    double d_opt = 0.0;
    InverseMetrics metrics;
};

/// Per-sample inverse metrics for each design plus the parallel-HOM
/// baseline row (always last). All designs must share one photon count;
/// for n != 3 the magnitudes are taken equal to the mean of theta's.
std::vector<ProtocolComparison> compare_protocols(const OverlapParameters& theta,
                                                  const std::vector<ExperimentDesign>& designs,
                                                  const std::vector<std::string>& labels = {});

}  // namespace phc

#endif
