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

#ifndef PHOTONCHAR_OPTIM_HPP
#define PHOTONCHAR_OPTIM_HPP

#include <functional>

#include "photonchar/core.hpp"

namespace phc {

/// Maximum worker threads for parallel restart batches. 1 disables
/// threading. Results are independent of this setting.
void set_max_threads(int n);
int max_threads();

/// Runs body(0..count-1), possibly across max_threads() workers. Each
/// index writes only its own slot, so results never depend on schedule.
void parallel_for(int count, const std::function<void(int)>& body);

struct NelderMeadOptions {
    int max_iterations = 5000;
    double x_tolerance = 1e-9;
    double f_tolerance = 1e-12;
    /// Initial simplex edge, relative to the box extent per dimension.
    double initial_scale = 0.12;
};

struct NelderMeadResult {
    RVector x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f over the box [lower, upper] (candidate points are clamped
/// to the box). Deterministic for a given start point.
NelderMeadResult nelder_mead(const std::function<double(const RVector&)>& f,
                             const RVector& start, const RVector& lower, const RVector& upper,
                             const NelderMeadOptions& options = {});

/// Maximizes a unimodal f on [a, b] by golden-section search; returns the
/// abscissa of the maximum.
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tolerance = 1e-10, int max_iterations = 200);

}  // namespace phc

#endif
