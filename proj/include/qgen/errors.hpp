// Copyright 2026 The qgenbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qgen {

/// Base class for all library exceptions.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidOperator : Error {
    using Error::Error;
};

struct UnknownLabel : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

/// Logarithm requested of an operator with an eigenvalue at or below the
/// floor while strict mode is active.
struct SingularLog : Error {
    using Error::Error;
};

/// A measurement branch carries probability below the floor; its
/// post-measurement state is undefined.
struct ZeroProbabilityOutcome : Error {
    using Error::Error;
};

struct NotFactorized : Error {
    using Error::Error;
};

/// A supplied log-MGF upper bound fails to dominate the measured profile.
struct InvalidMgfBound : Error {
    using Error::Error;
};

/// A 1-D optimization or inversion hit the edge of its search domain.
struct RangeExhausted : Error {
    using Error::Error;
};

struct EnumerationCap : Error {
    using Error::Error;
};

struct DimensionCap : Error {
    using Error::Error;
};

struct SolverFailure : Error {
    using Error::Error;
};

struct NetTooLarge : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace qgen
