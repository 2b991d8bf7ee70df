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

#ifndef PHOTONCHAR_CORE_HPP
#define PHOTONCHAR_CORE_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonchar/errors.hpp"

namespace phc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Photon count per spatial mode. Immutable after construction.
class OccupationList {
  public:
    explicit OccupationList(std::vector<int> occupations);

    int n_modes() const { return static_cast<int>(occ_.size()); }
    int n_photons() const { return total_; }
    int operator[](int mode) const { return occ_[static_cast<std::size_t>(mode)]; }
    const std::vector<int>& values() const { return occ_; }

    bool operator==(const OccupationList& other) const { return occ_ == other.occ_; }
    bool operator!=(const OccupationList& other) const { return occ_ != other.occ_; }

  private:
    std::vector<int> occ_;
    int total_ = 0;
};

/// Sorted list of the mode index each photon occupies (one entry per
/// photon). Invertible back to an OccupationList given the mode count.
class AssignmentList {
  public:
    explicit AssignmentList(std::vector<int> assignments);

    int n_photons() const { return static_cast<int>(assign_.size()); }
    int operator[](int photon) const { return assign_[static_cast<std::size_t>(photon)]; }
    const std::vector<int>& values() const { return assign_; }

    bool operator==(const AssignmentList& other) const { return assign_ == other.assign_; }

  private:
    std::vector<int> assign_;
};

AssignmentList occupation_to_assignment(const OccupationList& occ);
OccupationList assignment_to_occupation(const AssignmentList& assign, int n_modes);

/// All occupation lists of n photons over N modes in canonical order:
/// lexicographically descending with the leftmost mode most significant
/// ([n,0,...,0] first, [0,...,0,n] last). Stable across calls.
std::vector<OccupationList> enumerate_outcomes(int n_photons, int n_modes);

/// C(n_photons + n_modes - 1, n_photons).
std::int64_t outcome_count(int n_photons, int n_modes);

/// Index of `occ` within enumerate_outcomes(occ.n_photons(), occ.n_modes()).
int outcome_index(const OccupationList& occ);

/// Gram matrix of the photons' internal states. Hermitian with unit
/// diagonal by construction; positive semidefinite within a -1e-12
/// eigenvalue tolerance (boundary cases such as all overlaps equal to one
/// are exactly singular).
class DistinguishabilityMatrix {
  public:
    explicit DistinguishabilityMatrix(CMatrix entries);

    static DistinguishabilityMatrix identity(int dim);
    static DistinguishabilityMatrix all_ones(int dim);
    /// Every off-diagonal overlap equal to x (real).
    static DistinguishabilityMatrix equal_overlaps(int dim, double x);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const CMatrix& entries() const { return entries_; }
    double smallest_eigenvalue() const;

    /// Relabel photons by `perm`: result(i,j) = this(perm[i], perm[j]).
    DistinguishabilityMatrix permuted(const std::vector<int>& perm) const;

  private:
    CMatrix entries_;
};

/// The three pairwise overlap magnitudes plus the triad phase, under the
/// gauge convention that S12 and S23 are real non-negative and S13 carries
/// the full triad phase. Any Gram matrix of three unit vectors can be
/// brought to this form by per-photon phase redefinitions, which leave
/// every pmf invariant.
struct OverlapParameters {
    double x12 = 1.0;
    double x13 = 1.0;
    double x23 = 1.0;
    double triad_phase = 0.0;

    OverlapParameters() = default;
    OverlapParameters(double x12_, double x13_, double x23_, double triad_phase_ = 0.0);

    static OverlapParameters equal(double x) { return {x, x, x, 0.0}; }

    DistinguishabilityMatrix to_matrix() const;
    /// Gauge read-back: magnitudes and the S13 phase. Inverse of
    /// to_matrix() whenever all magnitudes are positive.
    static OverlapParameters from_matrix(const DistinguishabilityMatrix& s);

    std::array<double, 3> magnitudes() const { return {x12, x13, x23}; }
};

/// Unitary single-photon transfer matrix; entry (i, j) is the amplitude
/// for input mode i to reach output mode j.
class ScatteringMatrix {
  public:
    explicit ScatteringMatrix(CMatrix entries);

    static ScatteringMatrix identity(int dim);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const CMatrix& entries() const { return entries_; }

  private:
    CMatrix entries_;
};

/// Clements-style mesh parameters restricted to the (N-1)^2 degrees of
/// freedom a Fock-basis measurement can resolve: one splitting ratio per
/// two-mode crossing (Clements order) plus the internal phase shifters.
/// Ratios are cross-coupling probabilities (ratio 0 = identity, 1 = swap).
/// For N = 3 the layout is: BS(t1) on modes (0,1); phase alpha on mode 1;
/// BS(t2) on modes (1,2); BS(t3) on modes (0,1).
struct MeshParameters {
    std::vector<double> splitting_ratios;
    std::vector<double> phases;

    MeshParameters() = default;
    MeshParameters(std::vector<double> ratios, std::vector<double> phases_);

    /// Expected parameter counts for an N-mode mesh.
    static int ratio_count(int n_modes);
    static int phase_count(int n_modes);

    void validate(int n_modes) const;

    bool operator==(const MeshParameters& other) const {
        return splitting_ratios == other.splitting_ratios && phases == other.phases;
    }
};

/// One interference experiment: a mesh, an input occupation, and the
/// permutation routing photon sources to input modes (photon j enters the
/// mode that input_permutation[j] selects among the occupied modes).
struct ExperimentConfig {
    MeshParameters mesh;
    OccupationList input;
    std::vector<int> input_permutation;

    ExperimentConfig(MeshParameters mesh_, OccupationList input_, std::vector<int> perm);

    int n_photons() const { return input.n_photons(); }
    int n_modes() const { return input.n_modes(); }
};

/// A weighted collection of experiment configurations whose Fisher
/// information adds; weights are the fraction of measurement time spent on
/// each configuration and are normalized to sum to one.
struct ExperimentDesign {
    std::vector<ExperimentConfig> configs;
    std::vector<double> weights;

    ExperimentDesign(std::vector<ExperimentConfig> configs_, std::vector<double> weights_);

    /// Three instances of the Fig-1a-style protocol circuit differing only
    /// by the cyclic input permutations, equally weighted.
    /// `second_splitting_ratio` follows the protocol convention (see
    /// interferometer.hpp).
    static ExperimentDesign permuted_fig1(double second_splitting_ratio);

    int n_configs() const { return static_cast<int>(configs.size()); }
};

/// The three cyclic permutations of (0, 1, 2).
extern const std::array<std::array<int, 3>, 3> kCyclicPermutations3;

/// Probability mass function over all outcomes of n photons in N modes, in
/// canonical order. Probabilities are non-negative and sum to one within
/// 1e-10; construction enforces both.
struct Pmf {
    std::vector<OccupationList> outcomes;
    std::vector<double> probabilities;

    Pmf(std::vector<OccupationList> outcomes_, std::vector<double> probabilities_);

    int n_outcomes() const { return static_cast<int>(outcomes.size()); }
    int n_modes() const { return outcomes.empty() ? 0 : outcomes.front().n_modes(); }
    int n_photons() const { return outcomes.empty() ? 0 : outcomes.front().n_photons(); }

    int index_of(const OccupationList& occ) const;
    double probability_of(const OccupationList& occ) const;
};

/// Observed (or synthetic) sample counts in the same canonical outcome
/// order as a Pmf.
struct CountTable {
    std::vector<OccupationList> outcomes;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    CountTable(std::vector<OccupationList> outcomes_, std::vector<std::int64_t> counts_);

    int n_outcomes() const { return static_cast<int>(outcomes.size()); }
};

/// Fisher information matrix over a labelled parameter set. Symmetric
/// within 1e-8 relative; PSD within a -1e-8 * ||entries|| eigenvalue
/// tolerance.
struct FisherMatrix {
    RMatrix entries;
    std::vector<std::string> parameter_labels;

    FisherMatrix() : entries(0, 0) {}
    FisherMatrix(RMatrix entries_, std::vector<std::string> labels);

    int dim() const { return static_cast<int>(entries.rows()); }
    double smallest_eigenvalue() const;
};

/// Labels for the three-photon overlap magnitudes.
std::vector<std::string> overlap_magnitude_labels();

/// Labels for the C(n,2) pairwise magnitudes of an n-photon experiment,
/// lexicographic pair order (x12, x13, ..., x23, ...).
std::vector<std::string> pair_magnitude_labels(int n_photons);

}  // namespace phc

#endif
