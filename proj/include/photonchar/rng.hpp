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

#ifndef PHOTONCHAR_RNG_HPP
#define PHOTONCHAR_RNG_HPP

#include <cstdint>
#include <random>

namespace phc {

// Reproducibility contract: every randomized operation takes an explicit
// 64-bit seed and draws from a std::mt19937_64 whose behaviour is fixed by
// the C++ standard, so results are bit-identical across platforms and
// compilers. Independent streams (per restart, per configuration) are
// derived with derive_stream(seed, index), never by reusing or advancing a
// shared engine, so results do not depend on evaluation order or thread
// count.

/// One step of the splitmix64 generator (public-domain constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the `index`-th independent stream of a master seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t i = 0; i <= index; ++i) {
        out = splitmix64(state);
    }
    return out;
}

/// Seedable generator with explicitly specified uniform conversion
/// (implementation-defined distributions from <random> are avoided).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace phc

#endif
