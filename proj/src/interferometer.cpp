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

#include "photonchar/interferometer.hpp"

#include <cmath>
#include <set>

namespace phc {

namespace {

// Stages compose left to right in application order: with U(i,j) the
// amplitude from input i to output j, a stage A followed by B is A * B.

CMatrix beamsplitter_block(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw InvalidArgument("beamsplitter ratio must lie in [0, 1]");
    }
    const double bar = std::sqrt(1.0 - ratio);
    const Complex cross(0.0, std::sqrt(ratio));
    CMatrix b(2, 2);
    b << Complex(bar, 0.0), cross, cross, Complex(bar, 0.0);
    return b;
}

void apply_coupler(CMatrix& u, int mode, double ratio) {
    const CMatrix b = beamsplitter_block(ratio);
    // u <- u * embed(b): mixes columns `mode` and `mode + 1`.
    const Eigen::VectorXcd col_a = u.col(mode);
    const Eigen::VectorXcd col_b = u.col(mode + 1);
    u.col(mode) = col_a * b(0, 0) + col_b * b(1, 0);
    u.col(mode + 1) = col_a * b(0, 1) + col_b * b(1, 1);
}

void apply_phase(CMatrix& u, int mode, double phase) {
    u.col(mode) *= std::polar(1.0, phase);
}

// Clements brick pattern: columns alternate between couplers on
// (0,1),(2,3),... and (1,2),(3,4),...; positions listed column by column,
// top down. N(N-1)/2 couplers in N columns.
std::vector<int> clements_positions(int n_modes) {
    std::vector<int> modes;
    for (int col = 0; col < n_modes; ++col) {
        for (int m = col % 2; m + 1 < n_modes; m += 2) modes.push_back(m);
    }
    return modes;
}

}  // namespace

ScatteringMatrix beamsplitter(double ratio) { return ScatteringMatrix(beamsplitter_block(ratio)); }

ScatteringMatrix build_mesh(const MeshParameters& params, int n_modes) {
    params.validate(n_modes);
    CMatrix u = CMatrix::Identity(n_modes, n_modes);
    if (n_modes == 3) {
        // Fixed three-mode layout: BS(t1) on (0,1); phase alpha on mode 1;
        // BS(t2) on (1,2); BS(t3) on (0,1).
        apply_coupler(u, 0, params.splitting_ratios[0]);
        apply_phase(u, 1, params.phases[0]);
        apply_coupler(u, 1, params.splitting_ratios[1]);
        apply_coupler(u, 0, params.splitting_ratios[2]);
        return ScatteringMatrix(std::move(u));
    }
    // General N: phase shifters precede every coupler except the N-1
    // "first contact" couplers, those first joining two previously
    // unconnected groups of modes; input gauge phases absorb exactly those
    // slots, leaving (N-1)(N-2)/2 internal phases.
    const auto positions = clements_positions(n_modes);
    std::vector<int> group(static_cast<std::size_t>(n_modes));
    for (int m = 0; m < n_modes; ++m) group[static_cast<std::size_t>(m)] = m;
    std::size_t phase_idx = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const int m = positions[k];
        const int ga = group[static_cast<std::size_t>(m)];
        const int gb = group[static_cast<std::size_t>(m + 1)];
        if (ga == gb) {
            if (phase_idx >= params.phases.size()) {
                throw InvalidArgument("internal phase count does not match mesh layout");
            }
            apply_phase(u, m, params.phases[phase_idx++]);
        } else {
            for (int& g : group) {
                if (g == gb) g = ga;
            }
        }
        apply_coupler(u, m, params.splitting_ratios[k]);
    }
    if (phase_idx != params.phases.size()) {
        throw InvalidArgument("internal phase count does not match mesh layout");
    }
    return ScatteringMatrix(std::move(u));
}

ScatteringMatrix protocol_fig1(double second_splitting_ratio) {
    if (!(second_splitting_ratio >= 0.0 && second_splitting_ratio <= 1.0)) {
        throw InvalidArgument("splitting ratio must lie in [0, 1]");
    }
    return build_mesh(MeshParameters({0.5, 1.0 - second_splitting_ratio, 0.0}, {0.0}), 3);
}

ScatteringMatrix cascade_protocol(int n_photons, const std::vector<double>& splitting_ratios) {
    if (n_photons < 2) throw InvalidArgument("cascade needs at least two photons");
    if (static_cast<int>(splitting_ratios.size()) != n_photons - 1) {
        throw InvalidArgument("cascade needs one splitting ratio per beamsplitter (n_photons - 1)");
    }
    if (std::abs(splitting_ratios[0] - 0.5) > 1e-12) {
        throw InvalidArgument("the first cascade beamsplitter must be balanced");
    }
    CMatrix u = CMatrix::Identity(n_photons, n_photons);
    for (int k = 0; k + 1 < n_photons; ++k) {
        const double q = splitting_ratios[static_cast<std::size_t>(k)];
        if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("splitting ratio must lie in [0, 1]");
        apply_coupler(u, k, 1.0 - q);
    }
    return ScatteringMatrix(std::move(u));
}

ScatteringMatrix layered_protocol(int n_photons, const std::vector<LayeredCoupler>& second_layer) {
    if (n_photons < 2 || n_photons % 2 != 0) {
        throw InvalidArgument("the layered protocol needs an even photon count");
    }
    CMatrix u = CMatrix::Identity(n_photons, n_photons);
    for (int m = 0; m + 1 < n_photons; m += 2) apply_coupler(u, m, 0.5);
    std::set<int> used;
    for (const auto& c : second_layer) {
        if (c.mode_a < 0 || c.mode_b >= n_photons || c.mode_b != c.mode_a + 1) {
            throw InvalidArgument("second-layer couplers must join adjacent modes in range");
        }
        if (!used.insert(c.mode_a).second || !used.insert(c.mode_b).second) {
            throw InvalidArgument("a mode is used twice within the second layer");
        }
        if (!(c.ratio >= 0.0 && c.ratio <= 1.0)) {
            throw InvalidArgument("coupler ratio must lie in [0, 1]");
        }
    }
    bool some_pair_untouched = false;
    for (int m = 0; m + 1 < n_photons; m += 2) {
        if (used.count(m) == 0 || used.count(m + 1) == 0) some_pair_untouched = true;
    }
    if (!some_pair_untouched) {
        throw InvalidArgument(
            "at least one first-layer pair must keep an untouched output mode");
    }
    for (const auto& c : second_layer) apply_coupler(u, c.mode_a, c.ratio);
    return ScatteringMatrix(std::move(u));
}

ScatteringMatrix permute_inputs(const ScatteringMatrix& u, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != u.dim()) {
        throw InvalidArgument("permutation size must equal the mode count");
    }
    CMatrix out(u.dim(), u.dim());
    std::vector<bool> seen(perm.size(), false);
    for (int i = 0; i < u.dim(); ++i) {
        const int p = perm[static_cast<std::size_t>(i)];
        if (p < 0 || p >= u.dim() || seen[static_cast<std::size_t>(p)]) {
            throw InvalidArgument("invalid input permutation");
        }
        seen[static_cast<std::size_t>(p)] = true;
        out.row(i) = u.entries().row(p);
    }
    return ScatteringMatrix(std::move(out));
}

ScatteringMatrix config_unitary(const ExperimentConfig& config) {
    const ScatteringMatrix mesh = build_mesh(config.mesh, config.n_modes());
    const auto assignment = occupation_to_assignment(config.input);
    const int n = config.n_photons();
    for (int j = 0; j + 1 < n; ++j) {
        if (assignment[j] == assignment[j + 1]) {
            throw InvalidArgument("configurations require singly occupied input modes");
        }
    }
    // Photon j enters the occupied mode selected by its permuted label;
    // unoccupied modes keep their rows.
    std::vector<int> row_map(static_cast<std::size_t>(config.n_modes()));
    for (int m = 0; m < config.n_modes(); ++m) row_map[static_cast<std::size_t>(m)] = m;
    for (int j = 0; j < n; ++j) {
        row_map[static_cast<std::size_t>(assignment[j])] =
            assignment[config.input_permutation[static_cast<std::size_t>(j)]];
    }
    return permute_inputs(mesh, row_map);
}

double amplitude_fidelity(const ScatteringMatrix& target, const ScatteringMatrix& set) {
    if (target.dim() != set.dim()) throw InvalidArgument("fidelity requires equal dimensions");
    const RMatrix a = target.entries().adjoint().cwiseAbs();
    const RMatrix b = set.entries().cwiseAbs();
    return (a * b).trace() / static_cast<double>(target.dim());
}

}  // namespace phc
