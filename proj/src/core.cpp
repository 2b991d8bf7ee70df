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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "photonchar/interferometer.hpp"

namespace phc {

namespace {

constexpr double kPsdTolerance = 1e-12;
constexpr double kUnitarityTolerance = 1e-12;
constexpr double kPmfSumTolerance = 1e-10;

bool is_permutation(const std::vector<int>& perm, int size) {
    if (static_cast<int>(perm.size()) != size) return false;
    std::vector<bool> seen(perm.size(), false);
    for (int v : perm) {
        if (v < 0 || v >= size || seen[static_cast<std::size_t>(v)]) return false;
        seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
}

}  // namespace

OccupationList::OccupationList(std::vector<int> occupations) : occ_(std::move(occupations)) {
    if (occ_.empty()) throw InvalidArgument("occupation list must have at least one mode");
    for (int c : occ_) {
        if (c < 0) throw InvalidArgument("occupation list entries must be non-negative");
        total_ += c;
    }
}

AssignmentList::AssignmentList(std::vector<int> assignments) : assign_(std::move(assignments)) {
    if (!std::is_sorted(assign_.begin(), assign_.end())) {
        throw InvalidArgument("assignment list must be non-decreasing");
    }
    for (int m : assign_) {
        if (m < 0) throw InvalidArgument("assignment list entries must be mode indices");
    }
}

AssignmentList occupation_to_assignment(const OccupationList& occ) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(occ.n_photons()));
    for (int m = 0; m < occ.n_modes(); ++m) {
        for (int k = 0; k < occ[m]; ++k) out.push_back(m);
    }
    return AssignmentList(std::move(out));
}

OccupationList assignment_to_occupation(const AssignmentList& assign, int n_modes) {
    if (n_modes < 1) throw InvalidArgument("mode count must be positive");
    std::vector<int> occ(static_cast<std::size_t>(n_modes), 0);
    for (int i = 0; i < assign.n_photons(); ++i) {
        if (assign[i] >= n_modes) throw InvalidArgument("assignment entry exceeds mode count");
        ++occ[static_cast<std::size_t>(assign[i])];
    }
    return OccupationList(std::move(occ));
}

std::vector<OccupationList> enumerate_outcomes(int n_photons, int n_modes) {
    if (n_photons < 0) throw InvalidArgument("photon count must be non-negative");
    if (n_modes < 1) throw InvalidArgument("mode count must be positive");
    std::vector<OccupationList> out;
    out.reserve(static_cast<std::size_t>(outcome_count(n_photons, n_modes)));
    std::vector<int> current(static_cast<std::size_t>(n_modes), 0);
    // Descending lexicographic: fill left to right, largest counts first.
    auto rec = [&](auto&& self, int mode, int remaining) -> void {
        if (mode == n_modes - 1) {
            current[static_cast<std::size_t>(mode)] = remaining;
            out.emplace_back(current);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            current[static_cast<std::size_t>(mode)] = k;
            self(self, mode + 1, remaining - k);
        }
    };
    rec(rec, 0, n_photons);
    return out;
}

std::int64_t outcome_count(int n_photons, int n_modes) {
    // C(n + N - 1, n)
    std::int64_t result = 1;
    for (int i = 1; i <= n_photons; ++i) {
        result = result * (n_modes - 1 + i) / i;
    }
    return result;
}

int outcome_index(const OccupationList& occ) {
    // Rank within the descending-lexicographic enumeration.
    int index = 0;
    int remaining = occ.n_photons();
    const int n_modes = occ.n_modes();
    for (int mode = 0; mode < n_modes - 1; ++mode) {
        for (int k = remaining; k > occ[mode]; --k) {
            index += static_cast<int>(outcome_count(remaining - k, n_modes - mode - 1));
        }
        remaining -= occ[mode];
    }
    return index;
}

DistinguishabilityMatrix::DistinguishabilityMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
        throw InvalidArgument("distinguishability matrix must be square and non-empty");
    }
    const auto n = entries_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(entries_(i, i) - Complex(1.0, 0.0)) > 1e-12) {
            throw PhysicsError("distinguishability matrix must have unit diagonal");
        }
        entries_(i, i) = Complex(1.0, 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(entries_(i, j) - std::conj(entries_(j, i))) > 1e-12) {
                throw PhysicsError("distinguishability matrix must be Hermitian");
            }
            // Exact Hermiticity by construction.
            entries_(j, i) = std::conj(entries_(i, j));
            if (std::abs(entries_(i, j)) > 1.0 + 1e-12) {
                throw PhysicsError("overlap magnitudes cannot exceed 1");
            }
        }
    }
    if (smallest_eigenvalue() < -kPsdTolerance) {
        throw PhysicsError("distinguishability matrix is not positive semidefinite");
    }
}

DistinguishabilityMatrix DistinguishabilityMatrix::identity(int dim) {
    return DistinguishabilityMatrix(CMatrix::Identity(dim, dim));
}

DistinguishabilityMatrix DistinguishabilityMatrix::all_ones(int dim) {
    return DistinguishabilityMatrix(CMatrix::Ones(dim, dim));
}

DistinguishabilityMatrix DistinguishabilityMatrix::equal_overlaps(int dim, double x) {
    CMatrix m = CMatrix::Constant(dim, dim, Complex(x, 0.0));
    m.diagonal().setConstant(Complex(1.0, 0.0));
    return DistinguishabilityMatrix(std::move(m));
}

double DistinguishabilityMatrix::smallest_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

DistinguishabilityMatrix DistinguishabilityMatrix::permuted(const std::vector<int>& perm) const {
    if (!is_permutation(perm, dim())) {
        throw InvalidArgument("photon permutation does not match matrix dimension");
    }
    CMatrix out(dim(), dim());
    for (int i = 0; i < dim(); ++i) {
        for (int j = 0; j < dim(); ++j) {
            out(i, j) = entries_(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
    }
    return DistinguishabilityMatrix(std::move(out));
}

OverlapParameters::OverlapParameters(double x12_, double x13_, double x23_, double triad_phase_)
    : x12(x12_), x13(x13_), x23(x23_), triad_phase(triad_phase_) {
    for (double x : {x12, x13, x23}) {
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("overlap magnitudes must lie in [0, 1]");
    }
    if (!(triad_phase > -M_PI - 1e-12 && triad_phase <= M_PI + 1e-12)) {
        throw InvalidArgument("triad phase must lie in (-pi, pi]");
    }
    // Physicality: constructing the matrix throws if it is not PSD.
    (void)to_matrix();
}

DistinguishabilityMatrix OverlapParameters::to_matrix() const {
    CMatrix m(3, 3);
    const Complex s13 = std::polar(x13, triad_phase);
    m << Complex(1, 0), Complex(x12, 0), s13,
        Complex(x12, 0), Complex(1, 0), Complex(x23, 0),
        std::conj(s13), Complex(x23, 0), Complex(1, 0);
    return DistinguishabilityMatrix(std::move(m));
}

OverlapParameters OverlapParameters::from_matrix(const DistinguishabilityMatrix& s) {
    if (s.dim() != 3) throw InvalidArgument("overlap parameters require a 3x3 matrix");
    const auto& m = s.entries();
    OverlapParameters out;
    out.x12 = std::abs(m(0, 1));
    out.x13 = std::abs(m(0, 2));
    out.x23 = std::abs(m(1, 2));
    // Triad phase: the gauge-invariant phase of S12 S23 S31.
    const Complex triad = m(0, 1) * m(1, 2) * m(2, 0);
    out.triad_phase = -std::arg(triad);
    if (out.triad_phase <= -M_PI) out.triad_phase += 2.0 * M_PI;
    return out;
}

ScatteringMatrix::ScatteringMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
        throw InvalidArgument("scattering matrix must be square and non-empty");
    }
    const CMatrix gram = entries_.adjoint() * entries_;
    const double residual =
        (gram - CMatrix::Identity(entries_.rows(), entries_.cols())).cwiseAbs().maxCoeff();
    if (residual > kUnitarityTolerance) {
        throw PhysicsError("scattering matrix is not unitary (residual " + std::to_string(residual) +
                           ")");
    }
}

ScatteringMatrix ScatteringMatrix::identity(int dim) {
    return ScatteringMatrix(CMatrix::Identity(dim, dim));
}

MeshParameters::MeshParameters(std::vector<double> ratios, std::vector<double> phases_)
    : splitting_ratios(std::move(ratios)), phases(std::move(phases_)) {}

int MeshParameters::ratio_count(int n_modes) { return n_modes * (n_modes - 1) / 2; }

int MeshParameters::phase_count(int n_modes) { return (n_modes - 1) * (n_modes - 2) / 2; }

void MeshParameters::validate(int n_modes) const {
    if (n_modes < 2) throw InvalidArgument("a mesh needs at least two modes");
    if (static_cast<int>(splitting_ratios.size()) != ratio_count(n_modes)) {
        throw InvalidArgument("mesh has wrong splitting-ratio count for " +
                              std::to_string(n_modes) + " modes");
    }
    if (static_cast<int>(phases.size()) != phase_count(n_modes)) {
        throw InvalidArgument("mesh has wrong phase count for " + std::to_string(n_modes) +
                              " modes");
    }
    for (double r : splitting_ratios) {
        if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("splitting ratios must lie in [0, 1]");
    }
}

ExperimentConfig::ExperimentConfig(MeshParameters mesh_, OccupationList input_, std::vector<int> perm)
    : mesh(std::move(mesh_)), input(std::move(input_)), input_permutation(std::move(perm)) {
    mesh.validate(input.n_modes());
    if (!is_permutation(input_permutation, input.n_photons())) {
        throw InvalidArgument("input permutation must permute the photon labels");
    }
}

ExperimentDesign::ExperimentDesign(std::vector<ExperimentConfig> configs_, std::vector<double> weights_)
    : configs(std::move(configs_)), weights(std::move(weights_)) {
    if (configs.empty()) throw InvalidArgument("a design needs at least one configuration");
    if (weights.empty()) {
        weights.assign(configs.size(), 1.0 / static_cast<double>(configs.size()));
    }
    if (weights.size() != configs.size()) {
        throw InvalidArgument("design weights must match configuration count");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgument("design weights must be non-negative");
        sum += w;
    }
    if (sum <= 0.0) throw InvalidArgument("design weights must not all vanish");
    for (double& w : weights) w /= sum;
}

const std::array<std::array<int, 3>, 3> kCyclicPermutations3 = {{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};

ExperimentDesign ExperimentDesign::permuted_fig1(double second_splitting_ratio) {
    if (!(second_splitting_ratio >= 0.0 && second_splitting_ratio <= 1.0)) {
        throw InvalidArgument("splitting ratio must lie in [0, 1]");
    }
    MeshParameters mesh({0.5, 1.0 - second_splitting_ratio, 0.0}, {0.0});
    OccupationList input({1, 1, 1});
    std::vector<ExperimentConfig> configs;
    for (const auto& perm : kCyclicPermutations3) {
        configs.emplace_back(mesh, input, std::vector<int>(perm.begin(), perm.end()));
    }
    return ExperimentDesign(std::move(configs), {});
}

Pmf::Pmf(std::vector<OccupationList> outcomes_, std::vector<double> probabilities_)
    : outcomes(std::move(outcomes_)), probabilities(std::move(probabilities_)) {
    if (outcomes.size() != probabilities.size()) {
        throw InvalidArgument("pmf outcome and probability counts differ");
    }
    if (outcomes.empty()) throw InvalidArgument("pmf must not be empty");
    double sum = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw PhysicsError("pmf probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfSumTolerance) {
        throw PhysicsError("pmf probabilities sum to " + std::to_string(sum) +
                           ", expected 1 within 1e-10");
    }
}

int Pmf::index_of(const OccupationList& occ) const {
    const int idx = outcome_index(occ);
    if (idx < 0 || idx >= n_outcomes() || !(outcomes[static_cast<std::size_t>(idx)] == occ)) {
        throw InvalidArgument("outcome does not belong to this pmf");
    }
    return idx;
}

double Pmf::probability_of(const OccupationList& occ) const {
    return probabilities[static_cast<std::size_t>(index_of(occ))];
}

CountTable::CountTable(std::vector<OccupationList> outcomes_, std::vector<std::int64_t> counts_)
    : outcomes(std::move(outcomes_)), counts(std::move(counts_)) {
    if (outcomes.size() != counts.size()) {
        throw InvalidArgument("count table outcome and count sizes differ");
    }
    for (std::int64_t c : counts) {
        if (c < 0) throw InvalidArgument("counts must be non-negative");
        total += c;
    }
}

FisherMatrix::FisherMatrix(RMatrix entries_, std::vector<std::string> labels)
    : entries(std::move(entries_)), parameter_labels(std::move(labels)) {
    if (entries.rows() != entries.cols()) throw InvalidArgument("Fisher matrix must be square");
    if (static_cast<int>(parameter_labels.size()) != entries.rows()) {
        throw InvalidArgument("Fisher matrix labels must match its dimension");
    }
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * scale) {
        throw InvalidArgument("Fisher matrix is not symmetric within tolerance");
    }
    entries = ((entries + entries.transpose()) / 2.0).eval();
}

double FisherMatrix::smallest_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

std::vector<std::string> overlap_magnitude_labels() { return {"x12", "x13", "x23"}; }

std::vector<std::string> pair_magnitude_labels(int n_photons) {
    std::vector<std::string> labels;
    for (int i = 0; i < n_photons; ++i) {
        for (int j = i + 1; j < n_photons; ++j) {
            labels.push_back("x" + std::to_string(i + 1) + std::to_string(j + 1));
        }
    }
    return labels;
}

}  // namespace phc
