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
#include <complex>
#include <string>
#include <utility>

#include "qgen/errors.hpp"
#include "qgen/shape.hpp"
#include "qgen/tolerances.hpp"

namespace qgen {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {

inline void check_square_and_shape(const Matrix& m, const SubsystemShape& shape,
                                   const char* what) {
    if (m.rows() != m.cols())
        throw InvalidOperator(std::string(what) + ": matrix is not square");
    if (m.rows() != shape.total_dim())
        throw InvalidOperator(std::string(what) + ": matrix dimension " +
                              std::to_string(m.rows()) + " does not match shape " +
                              shape.to_string());
}

inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// A self-adjoint operator with subsystem metadata. The stored matrix is the
/// symmetrization (M + M^dag)/2 of the input.
class HermitianObservable {
public:
    HermitianObservable(Matrix m, SubsystemShape shape) : shape_(std::move(shape)) {
        detail::check_square_and_shape(m, shape_, "HermitianObservable");
        if (detail::hermiticity_defect(m) > tol::herm)
            throw InvalidOperator("HermitianObservable: input is not Hermitian within tolerance");
        mat_ = 0.5 * (m + m.adjoint().eval());
    }

    const Matrix& matrix() const { return mat_; }
    const SubsystemShape& shape() const { return shape_; }
    long long dim() const { return mat_.rows(); }

private:
    Matrix mat_;
    SubsystemShape shape_;
};

/// A quantum state: Hermitian, unit trace, positive semidefinite within
/// tolerance. Eigenvalues in [-tol_psd, 0) are clipped to zero and the
/// spectrum renormalized, absorbing eigensolver noise.
class DensityOperator {
public:
    DensityOperator(Matrix m, SubsystemShape shape) : shape_(std::move(shape)) {
        detail::check_square_and_shape(m, shape_, "DensityOperator");
        if (detail::hermiticity_defect(m) > tol::herm)
            throw InvalidOperator("DensityOperator: input is not Hermitian within tolerance");
        Matrix h = 0.5 * (m + m.adjoint().eval());
        const double tr = h.trace().real();
        if (std::abs(tr - 1.0) > tol::trace)
            throw InvalidOperator("DensityOperator: trace " + std::to_string(tr) +
                                  " is not 1 within tolerance");
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        if (es.info() != Eigen::Success)
            throw InvalidOperator("DensityOperator: eigendecomposition failed");
        Eigen::VectorXd ev = es.eigenvalues();
        if (ev.minCoeff() < -tol::psd)
            throw InvalidOperator("DensityOperator: negative eigenvalue " +
                                  std::to_string(ev.minCoeff()) + " beyond tolerance");
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev[i] < 0.0) ev[i] = 0.0;
        ev /= ev.sum();
        mat_ = es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
               es.eigenvectors().adjoint();
    }

    const Matrix& matrix() const { return mat_; }
    const SubsystemShape& shape() const { return shape_; }
    long long dim() const { return mat_.rows(); }

    /// View as a plain observable (every state is one).
    HermitianObservable as_observable() const { return HermitianObservable(mat_, shape_); }

private:
    Matrix mat_;
    SubsystemShape shape_;
};

/// A POVM effect: Hermitian with spectrum in [-tol_psd, 1 + tol_psd].
class EffectOperator {
public:
    EffectOperator(Matrix m, SubsystemShape shape) : shape_(std::move(shape)) {
        detail::check_square_and_shape(m, shape_, "EffectOperator");
        if (detail::hermiticity_defect(m) > tol::herm)
            throw InvalidOperator("EffectOperator: input is not Hermitian within tolerance");
        mat_ = 0.5 * (m + m.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo < -tol::psd || hi > 1.0 + tol::psd)
            throw InvalidOperator("EffectOperator: spectrum [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "] escapes [0, 1] beyond tolerance");
    }

    const Matrix& matrix() const { return mat_; }
    const SubsystemShape& shape() const { return shape_; }
    long long dim() const { return mat_.rows(); }

    HermitianObservable as_observable() const { return HermitianObservable(mat_, shape_); }

private:
    Matrix mat_;
    SubsystemShape shape_;
};

/// |i><i| on a single subsystem of dimension d.
inline Matrix basis_projector(int i, int d) {
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = 1.0;
    return m;
}

inline Vector basis_ket(int i, int d) {
    Vector v = Vector::Zero(d);
    v[i] = 1.0;
    return v;
}

inline Matrix identity_matrix(long long d) { return Matrix::Identity(d, d); }

}  // namespace qgen
