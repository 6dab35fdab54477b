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

#include <map>
#include <string>
#include <vector>

#include "qgen/bounds.hpp"

namespace qgen {

enum class ScenarioKind {
    stateClassification,
    pacStateLearning,
    entangledPac,
    parameterEstimation,
};

inline const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::stateClassification: return "stateClassification";
        case ScenarioKind::pacStateLearning: return "pacStateLearning";
        case ScenarioKind::entangledPac: return "entangledPac";
        case ScenarioKind::parameterEstimation: return "parameterEstimation";
    }
    return "?";
}

/// A fully assembled scenario instance plus the inputs its bound evaluation
/// expects and free-form numeric metadata (net sizes, diameters, ...).
struct BuiltScenario {
    CQEnsemble ens;
    Learner lr;
    LossFamily loss;
    CertifyInputs inputs;
    BoundKind default_bound = BoundKind::cor22;
    std::map<std::string, double> metadata;
};

/// One evaluated scenario point.
struct ScenarioRun {
    RiskReport risks;
    BoundCertificate cert;
    std::map<std::string, double> extras;
};

struct SweepPoint {
    double axis_value = 0.0;
    std::uint64_t seed = 0;
    RiskReport risks;
    BoundCertificate cert;
    std::map<std::string, double> extras;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;  // ordered by axis value
};

}  // namespace qgen
