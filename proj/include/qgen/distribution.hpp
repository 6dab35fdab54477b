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

#include <Eigen/Dense>
#include <vector>

#include "qgen/errors.hpp"
#include "qgen/tolerances.hpp"

namespace qgen {

/// Finite joint distribution over (data record, hypothesis) pairs, stored as
/// a dense |S| x |W| mass matrix. Mass may be deficient by at most the
/// configured tolerance when near-zero outcomes were dropped upstream.
class JointDistribution {
public:
    JointDistribution(Eigen::MatrixXd mass, double mass_tolerance = tol::povm)
        : mass_(std::move(mass)) {
        if (mass_.size() == 0) throw InvalidOperator("JointDistribution: empty mass matrix");
        if (mass_.minCoeff() < -tol::p_floor)
            throw InvalidOperator("JointDistribution: negative probability mass");
        const double total = mass_.sum();
        if (std::abs(total - 1.0) > mass_tolerance)
            throw InvalidOperator("JointDistribution: mass sums to " + std::to_string(total));
    }

    const Eigen::MatrixXd& mass() const { return mass_; }
    Eigen::Index n_data() const { return mass_.rows(); }
    Eigen::Index n_hyp() const { return mass_.cols(); }

    double operator()(Eigen::Index s, Eigen::Index w) const { return mass_(s, w); }

    Eigen::VectorXd data_marginal() const { return mass_.rowwise().sum(); }
    Eigen::VectorXd hyp_marginal() const { return mass_.colwise().sum().transpose(); }

    /// Conditional distribution over hypotheses given data index s.
    Eigen::VectorXd hyp_given_data(Eigen::Index s) const {
        Eigen::VectorXd row = mass_.row(s).transpose();
        const double p = row.sum();
        if (p <= tol::p_floor)
            throw ZeroProbabilityOutcome("conditional on a data record of vanishing probability");
        return row / p;
    }

private:
    Eigen::MatrixXd mass_;
};

}  // namespace qgen
