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

#ifndef PHOTONCHAR_ERRORS_HPP
#define PHOTONCHAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace phc {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, out-of-range parameters,
/// inconsistent shapes.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Violations of physical constraints: non-unitary scattering matrices,
/// non-PSD distinguishability matrices, probabilities below the negativity
/// tolerance.
class PhysicsError : public Error {
  public:
    using Error::Error;
};

/// A hard resource guard was exceeded (permanent dimension, Fock-space
/// size).
class LimitError : public Error {
  public:
    using Error::Error;
};

}  // namespace phc

#endif
