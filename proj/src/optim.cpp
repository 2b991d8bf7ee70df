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

#include "photonchar/optim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

namespace phc {

namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) { g_max_threads.store(std::max(1, n)); }
int max_threads() { return g_max_threads.load(); }

void parallel_for(int count, const std::function<void(int)>& body) {
    const int threads = std::min(max_threads(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

NelderMeadResult nelder_mead(const std::function<double(const RVector&)>& f,
                             const RVector& start, const RVector& lower, const RVector& upper,
                             const NelderMeadOptions& options) {
    const int n = static_cast<int>(start.size());
    if (lower.size() != n || upper.size() != n) {
        throw InvalidArgument("optimizer bounds must match the dimension");
    }
    auto clamp = [&](RVector x) {
        for (int i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
        return x;
    };

    std::vector<RVector> points;
    std::vector<double> values;
    points.push_back(clamp(start));
    for (int i = 0; i < n; ++i) {
        RVector p = points.front();
        const double step = options.initial_scale * (upper[i] - lower[i]);
        p[i] = (p[i] + step <= upper[i]) ? p[i] + step : p[i] - step;
        points.push_back(clamp(p));
    }
    int evaluations = 0;
    for (const auto& p : points) {
        values.push_back(f(p));
        ++evaluations;
    }

    NelderMeadResult result;
    std::vector<int> order(points.size());
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return values[a] < values[b]; });
        std::vector<RVector> sorted_points;
        std::vector<double> sorted_values;
        for (int idx : order) {
            sorted_points.push_back(points[static_cast<std::size_t>(idx)]);
            sorted_values.push_back(values[static_cast<std::size_t>(idx)]);
        }
        points.swap(sorted_points);
        values.swap(sorted_values);

        double spread = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            spread = std::max(spread, (points[i] - points[0]).cwiseAbs().maxCoeff());
        }
        if (std::abs(values.back() - values.front()) <=
                options.f_tolerance * (1.0 + std::abs(values.front())) &&
            spread <= options.x_tolerance) {
            result.converged = true;
            result.iterations = iter;
            break;
        }

        RVector centroid = RVector::Zero(n);
        for (std::size_t i = 0; i + 1 < points.size(); ++i) centroid += points[i];
        centroid /= static_cast<double>(n);

        const RVector& worst = points.back();
        const RVector reflected = clamp(centroid + (centroid - worst));
        const double f_reflected = f(reflected);
        ++evaluations;
        if (f_reflected < values.front()) {
            const RVector expanded = clamp(centroid + 2.0 * (centroid - worst));
            const double f_expanded = f(expanded);
            ++evaluations;
            if (f_expanded < f_reflected) {
                points.back() = expanded;
                values.back() = f_expanded;
            } else {
                points.back() = reflected;
                values.back() = f_reflected;
            }
        } else if (f_reflected < values[values.size() - 2]) {
            points.back() = reflected;
            values.back() = f_reflected;
        } else {
            const RVector contracted = clamp(centroid + 0.5 * (worst - centroid));
            const double f_contracted = f(contracted);
            ++evaluations;
            if (f_contracted < values.back()) {
                points.back() = contracted;
                values.back() = f_contracted;
            } else {
                for (std::size_t i = 1; i < points.size(); ++i) {
                    points[i] = clamp(points[0] + 0.5 * (points[i] - points[0]));
                    values[i] = f(points[i]);
                    ++evaluations;
                }
            }
        }
        result.iterations = iter + 1;
    }

    const auto best = std::min_element(values.begin(), values.end());
    result.x = points[static_cast<std::size_t>(std::distance(values.begin(), best))];
    result.value = *best;
    result.evaluations = evaluations;
    return result;
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tolerance, int max_iterations) {
    if (!(a < b)) throw InvalidArgument("golden-section bracket must satisfy a < b");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iterations && (b - a) > x_tolerance; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

}  // namespace phc
