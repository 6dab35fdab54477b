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

#include <cstdint>

namespace qgen {

// Numerical tolerances shared across the library. All entropies and
// logarithms are in natural units (nats).
namespace tol {

inline constexpr double herm = 1e-10;        // Hermiticity of constructed operators
inline constexpr double trace = 1e-10;       // unit-trace check for states
inline constexpr double psd = 1e-10;         // admissible negative eigenvalue mass
inline constexpr double eig_floor = 1e-12;   // smallest eigenvalue accepted by log
inline constexpr double povm = 1e-9;         // POVM completeness / channel trace preservation
inline constexpr double p_floor = 1e-12;     // probability below which an outcome is dropped
inline constexpr double support = 1e-10;     // eigenvalue cutoff defining operator support
inline constexpr double mass_deficit = 1e-9; // admissible probability mass lost to dropped outcomes
inline constexpr double cert_slack = 1e-9;   // certificate pass margin: holds iff slack >= -cert_slack

}  // namespace tol

namespace caps {

inline constexpr std::int64_t enum_pairs = 2'000'000;  // max (s, w) pairs enumerated
inline constexpr int w1_dimension = 64;                // max total dimension for transport solves

}  // namespace caps

}  // namespace qgen
