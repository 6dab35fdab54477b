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

#include <limits>
#include <utility>
#include <vector>

#include "qgen/distribution.hpp"
#include "qgen/qmat.hpp"

namespace qgen {

inline constexpr double infinite_divergence = std::numeric_limits<double>::infinity();

inline bool is_infinite(double x) { return std::isinf(x); }

/// Clamp a mathematically nonnegative information quantity whose computed
/// value may carry eigensolver noise. Values below -1e-8 indicate a real
/// defect and are rejected.
inline double clamp_information(double x, const char* what = "information quantity") {
    if (x < -1e-8) throw SolverFailure(std::string(what) + " is negative: " + std::to_string(x));
    return x < 0.0 ? 0.0 : x;
}

/// Finite ensemble {p(x), rho(x)} of states on a common shape.
class EnsembleOfStates {
public:
    EnsembleOfStates(std::vector<std::pair<double, DensityOperator>> items,
                     double mass_tolerance = tol::povm)
        : items_(std::move(items)) {
        if (items_.empty()) throw InvalidOperator("EnsembleOfStates: empty ensemble");
        double total = 0.0;
        for (const auto& [p, state] : items_) {
            if (p < -tol::p_floor) throw InvalidOperator("EnsembleOfStates: negative probability");
            if (state.shape() != items_.front().second.shape())
                throw ShapeMismatch("EnsembleOfStates: members live on different shapes");
            total += p;
        }
        if (std::abs(total - 1.0) > mass_tolerance)
            throw InvalidOperator("EnsembleOfStates: probabilities sum to " +
                                  std::to_string(total));
    }

    const std::vector<std::pair<double, DensityOperator>>& items() const { return items_; }

private:
    std::vector<std::pair<double, DensityOperator>> items_;
};

/// Von Neumann entropy in nats; 0 log 0 reads as 0.
inline double von_neumann_entropy(const DensityOperator& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double h = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam > 0.0) h -= lam * std::log(lam);
    }
    return h < 0.0 ? 0.0 : h;
}

namespace detail {

/// Relative entropy on raw Hermitian PSD matrices with unit trace. Returns
/// +infinity when the support condition fails.
inline double relative_entropy_matrix(const Matrix& rho, const Matrix& sigma) {
    Eigen::SelfAdjointEigenSolver<Matrix> er(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    if (er.info() != Eigen::Success || es.info() != Eigen::Success)
        throw SolverFailure("relative_entropy: eigendecomposition failed");

    // Projector onto the kernel of sigma (eigenvalues at or below the support
    // tolerance).
    const Eigen::Index d = rho.rows();
    Matrix kernel_proj = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        if (es.eigenvalues()[j] <= tol::support)
            kernel_proj += es.eigenvectors().col(j) * es.eigenvectors().col(j).adjoint();

    double tr_rho_log_rho = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double lam = er.eigenvalues()[i];
        if (lam <= tol::support) continue;
        // Support condition: this eigenvector must be orthogonal to ker(sigma).
        const double leak =
            (kernel_proj * er.eigenvectors().col(i)).squaredNorm();
        if (leak > tol::support) return infinite_divergence;
        tr_rho_log_rho += lam * std::log(lam);
    }

    double tr_rho_log_sigma = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mu = es.eigenvalues()[j];
        if (mu <= tol::support) continue;
        const double weight =
            (es.eigenvectors().col(j).adjoint() * rho * es.eigenvectors().col(j))(0, 0).real();
        tr_rho_log_sigma += weight * std::log(mu);
    }
    return clamp_information(tr_rho_log_rho - tr_rho_log_sigma, "relative entropy");
}

}  // namespace detail

/// Quantum relative entropy D(rho || sigma) in nats; +infinity when
/// supp(rho) escapes supp(sigma).
inline double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.shape().total_dim() != sigma.shape().total_dim())
        throw ShapeMismatch("relative_entropy: operands have different dimensions");
    return detail::relative_entropy_matrix(rho.matrix(), sigma.matrix());
}

/// Quantum mutual information across the bipartition (cut, rest) in nats.
inline double qmi(const DensityOperator& rho, const std::vector<std::string>& cut_labels) {
    if (cut_labels.empty()) throw UnknownLabel("qmi: empty cut");
    if (cut_labels.size() >= rho.shape().size())
        throw UnknownLabel("qmi: cut must be a proper subset of the subsystems");
    const auto cut_pos = rho.shape().positions_of(cut_labels);
    const auto rest = rho.shape().complement(cut_pos);

    const auto rho_a = partial_trace(rho, cut_labels);
    const auto rho_b = partial_trace(rho, rest.labels());
    const double value =
        von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho);
    return clamp_information(value, "quantum mutual information");
}

/// Holevo information of an ensemble: H(avg) - E[H(rho_x)].
inline double holevo_information(const EnsembleOfStates& ens) {
    const auto& items = ens.items();
    Matrix avg = Matrix::Zero(items.front().second.dim(), items.front().second.dim());
    double mass = 0.0;
    for (const auto& [p, state] : items) {
        avg += p * state.matrix();
        mass += p;
    }
    avg /= mass;  // tolerate the tiny deficit left by dropped outcomes
    DensityOperator avg_state(avg, items.front().second.shape());
    double value = von_neumann_entropy(avg_state);
    for (const auto& [p, state] : items) value -= (p / mass) * von_neumann_entropy(state);
    return clamp_information(value, "Holevo information");
}

/// Classical mutual information of a finite joint distribution, in nats.
inline double classical_mi(const JointDistribution& joint) {
    const auto ps = joint.data_marginal();
    const auto pw = joint.hyp_marginal();
    double mi = 0.0;
    for (Eigen::Index s = 0; s < joint.n_data(); ++s)
        for (Eigen::Index w = 0; w < joint.n_hyp(); ++w) {
            const double p = joint(s, w);
            if (p <= 0.0) continue;
            mi += p * std::log(p / (ps[s] * pw[w]));
        }
    return clamp_information(mi, "classical mutual information");
}

/// Variational lower-bound certificate for the relative entropy:
/// tr[sigma1 H] - log tr[exp(log sigma2 + H)] <= D(sigma1 || sigma2) for
/// every Hermitian H, with equality at H = log sigma1 - log sigma2.
inline double petz_certificate(const DensityOperator& sigma1, const DensityOperator& sigma2,
                               const HermitianObservable& h,
                               LogPolicy policy = LogPolicy::clip) {
    if (sigma1.dim() != sigma2.dim() || sigma1.dim() != h.dim())
        throw ShapeMismatch("petz_certificate: dimension mismatch");
    const double first = (sigma1.matrix() * h.matrix()).trace().real();
    const Matrix inner = matrix_log(sigma2.matrix(), policy) + h.matrix();
    const double second = std::log(matrix_exp(inner).trace().real());
    return first - second;
}

}  // namespace qgen
