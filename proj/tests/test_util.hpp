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

#ifndef PHOTONCHAR_TESTS_TEST_UTIL_HPP
#define PHOTONCHAR_TESTS_TEST_UTIL_HPP

#include <cmath>

#include "photonchar/core.hpp"
#include "photonchar/rng.hpp"

namespace phc::testing {

inline double gaussian(Rng& rng) {
    // Box-Muller; the tiny floor keeps log() finite.
    const double u1 = std::max(rng.uniform01(), 1e-300);
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline CMatrix ginibre(int n, Rng& rng) {
    CMatrix z(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            z(i, j) = Complex(gaussian(rng), gaussian(rng)) / std::sqrt(2.0);
        }
    }
    return z;
}

/// Haar-random unitary: QR of a Ginibre matrix with the R-diagonal phases
/// absorbed.
inline ScatteringMatrix random_unitary(int n, Rng& rng) {
    const CMatrix z = ginibre(n, rng);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= (d == Complex(0, 0)) ? Complex(1, 0) : d / std::abs(d);
    }
    return ScatteringMatrix(std::move(q));
}

/// Random Gram matrix of unit vectors (unit diagonal, PSD).
inline DistinguishabilityMatrix random_gram(int n, Rng& rng) {
    CMatrix v = ginibre(n, rng);
    for (int j = 0; j < n; ++j) v.col(j) /= v.col(j).norm();
    CMatrix gram = v.adjoint() * v;
    gram.diagonal().setConstant(Complex(1.0, 0.0));
    return DistinguishabilityMatrix(std::move(gram));
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

}  // namespace phc::testing

#endif
