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

#include <vector>

#include "qgen/qmat.hpp"
#include "qgen/rng.hpp"

namespace qgen {

inline Matrix ginibre(Rng& rng, long long rows, long long cols) {
    Matrix g(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    return g;
}

inline Matrix random_hermitian_matrix(Rng& rng, long long d, double scale = 1.0) {
    Matrix g = ginibre(rng, d, d);
    return (scale * 0.5) * (g + g.adjoint().eval());
}

inline HermitianObservable random_hermitian(Rng& rng, const SubsystemShape& shape,
                                            double scale = 1.0) {
    return HermitianObservable(random_hermitian_matrix(rng, shape.total_dim(), scale), shape);
}

/// Haar-ish unitary from the QR decomposition of a Ginibre matrix.
inline Matrix random_unitary(Rng& rng, long long d) {
    Matrix g = ginibre(rng, d, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long long i = 0; i < d; ++i) {
        Complex rii = r(i, i);
        q.col(i) *= (rii == Complex(0.0) ? Complex(1.0) : rii / std::abs(rii));
    }
    return q;
}

/// Full-rank state from the Wishart ensemble, optionally mixed with the
/// maximally mixed state to push eigenvalues away from zero.
inline DensityOperator random_density(Rng& rng, const SubsystemShape& shape,
                                      double mix_identity = 0.0) {
    const long long d = shape.total_dim();
    Matrix g = ginibre(rng, d, d);
    Matrix w = g * g.adjoint();
    w /= w.trace().real();
    if (mix_identity > 0.0)
        w = (1.0 - mix_identity) * w + (mix_identity / static_cast<double>(d)) * identity_matrix(d);
    return DensityOperator(w, shape);
}

inline DensityOperator random_pure_density(Rng& rng, const SubsystemShape& shape) {
    const long long d = shape.total_dim();
    Vector v(d);
    for (long long i = 0; i < d; ++i) v[i] = Complex(rng.normal(), rng.normal());
    v.normalize();
    return DensityOperator(v * v.adjoint(), shape);
}

/// Random POVM: normalize Wishart-positive pieces through the inverse square
/// root of their sum.
inline std::vector<EffectOperator> random_povm(Rng& rng, const SubsystemShape& shape,
                                               int n_outcomes) {
    const long long d = shape.total_dim();
    std::vector<Matrix> pieces;
    Matrix sum = Matrix::Zero(d, d);
    for (int k = 0; k < n_outcomes; ++k) {
        Matrix g = ginibre(rng, d, d);
        pieces.push_back((g * g.adjoint()).eval());
        sum += pieces.back();
    }
    Matrix inv_sqrt = hermitian_fn_matrix(sum, [](double x) {
        return x > tol::eig_floor ? 1.0 / std::sqrt(x) : 0.0;
    });
    std::vector<EffectOperator> out;
    out.reserve(static_cast<std::size_t>(n_outcomes));
    for (const auto& p : pieces) out.emplace_back(inv_sqrt * p * inv_sqrt, shape);
    return out;
}

/// Random Kraus family for a channel in_dim -> out_dim via a random isometry
/// into out (x) environment.
inline std::vector<Matrix> random_kraus(Rng& rng, long long in_dim, long long out_dim,
                                        int n_kraus) {
    Matrix g = ginibre(rng, out_dim * n_kraus, in_dim);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = Matrix(qr.householderQ()).leftCols(in_dim);
    std::vector<Matrix> kraus;
    kraus.reserve(static_cast<std::size_t>(n_kraus));
    for (int k = 0; k < n_kraus; ++k)
        kraus.push_back(q.block(k * out_dim, 0, out_dim, in_dim).eval());
    return kraus;
}

}  // namespace qgen
