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

#ifndef PHOTONCHAR_INTERFEROMETER_HPP
#define PHOTONCHAR_INTERFEROMETER_HPP

#include <vector>

#include "photonchar/core.hpp"

namespace phc {

// Two ratio conventions coexist and are named consistently throughout:
//
//  * `ratio` (elementary beamsplitter, mesh parameters, layered couplers)
//    is the cross-coupling probability: ratio 0 is the identity, ratio 1 a
//    full swap.
//
//  * `splitting_ratio` (the protocol builders protocol_fig1 and
//    cascade_protocol, and optimal_second_ratio in fisher.hpp) is the
//    straight-through probability of the named beamsplitter, the quantity
//    the characterization protocol is parameterized by. The two are
//    complementary: a protocol splitting_ratio q is realized by a mesh
//    ratio of 1 - q. The distinctive value is q = 1/3, where the bunched
//    two-photon component entering the second coupler interferes
//    destructively into the single-photon-per-mode output.

/// 2x2 beamsplitter [[sqrt(1-r), i*sqrt(r)], [i*sqrt(r), sqrt(1-r)]] with
/// cross probability r in [0, 1].
ScatteringMatrix beamsplitter(double ratio);

/// N-mode Clements-style mesh from the pmf-relevant parameter set; see
/// MeshParameters for the layout. Always unitary.
ScatteringMatrix build_mesh(const MeshParameters& params, int n_modes);

/// The three-photon protocol circuit: a balanced beamsplitter on modes
/// (0,1) followed by a beamsplitter on modes (1,2) whose straight-through
/// probability is `second_splitting_ratio`. Equals
/// build_mesh({0.5, 1 - q, 0}, {0}, 3).
ScatteringMatrix protocol_fig1(double second_splitting_ratio);

/// Cascade generalization: beamsplitter k couples modes (k, k+1), chaining
/// the previous output arm with a fresh photon. `splitting_ratios` holds
/// n_photons - 1 straight-through probabilities; the first must be 0.5.
ScatteringMatrix cascade_protocol(int n_photons, const std::vector<double>& splitting_ratios);

/// A second-layer coupler of the layered generalization; `ratio` is a
/// cross probability as in beamsplitter().
struct LayeredCoupler {
    int mode_a;
    int mode_b;
    double ratio;
};

/// Layered generalization: balanced beamsplitters on the disjoint pairs
/// (0,1), (2,3), ... followed by the given second-layer couplers. Requires
/// an even photon count, non-overlapping second-layer couplers, and at
/// least one first-layer pair with an untouched output mode.
ScatteringMatrix layered_protocol(int n_photons, const std::vector<LayeredCoupler>& second_layer);

/// Reorder input modes: result row i equals u row perm[i].
ScatteringMatrix permute_inputs(const ScatteringMatrix& u, const std::vector<int>& perm);

/// The scattering matrix a configuration realizes: the mesh with its input
/// permutation applied (photon sources routed onto the occupied modes).
ScatteringMatrix config_unitary(const ExperimentConfig& config);

/// Amplitude fidelity (1/N) Tr(|U_target^dag| |U_set|), elementwise
/// absolute values, phase-insensitive.
double amplitude_fidelity(const ScatteringMatrix& target, const ScatteringMatrix& set);

}  // namespace phc

#endif
