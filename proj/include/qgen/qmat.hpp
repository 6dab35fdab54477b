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
#include <functional>
#include <unsupported/Eigen/KroneckerProduct>

#include "qgen/indexing.hpp"
#include "qgen/operators.hpp"

namespace qgen {

// ---------------------------------------------------------------------------
// Tensor products
// ---------------------------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

inline HermitianObservable tensor_product(const HermitianObservable& a,
                                          const HermitianObservable& b) {
    return HermitianObservable(kron(a.matrix(), b.matrix()),
                               SubsystemShape::concat(a.shape(), b.shape()));
}

inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator(kron(a.matrix(), b.matrix()),
                           SubsystemShape::concat(a.shape(), b.shape()));
}

inline EffectOperator tensor_product(const EffectOperator& a, const EffectOperator& b) {
    return EffectOperator(kron(a.matrix(), b.matrix()),
                          SubsystemShape::concat(a.shape(), b.shape()));
}

// ---------------------------------------------------------------------------
// Partial trace
// ---------------------------------------------------------------------------

/// Reduce `m` (with subsystem structure `shape`) to the subsystems named in
/// `keep`, tracing out the rest. Kept subsystems retain their relative order.
inline Matrix partial_trace_matrix(const Matrix& m, const SubsystemShape& shape,
                                   const std::vector<std::string>& keep) {
    for (const auto& l : keep) shape.index_of(l);  // throws UnknownLabel
    const auto positions = shape.positions_of(keep);
    IndexSplit split(shape, positions);
    const long long dk = split.sub_dim();
    const long long dc = split.comp_dim();
    Matrix out = Matrix::Zero(dk, dk);
    for (long long a = 0; a < dk; ++a)
        for (long long b = 0; b < dk; ++b) {
            Complex acc = 0.0;
            for (long long c = 0; c < dc; ++c) acc += m(split.global(a, c), split.global(b, c));
            out(a, b) = acc;
        }
    return out;
}

inline HermitianObservable partial_trace(const HermitianObservable& op,
                                         const std::vector<std::string>& keep) {
    const auto positions = op.shape().positions_of(keep);
    return HermitianObservable(partial_trace_matrix(op.matrix(), op.shape(), keep),
                               op.shape().select(positions));
}

inline DensityOperator partial_trace(const DensityOperator& op,
                                     const std::vector<std::string>& keep) {
    const auto positions = op.shape().positions_of(keep);
    return DensityOperator(partial_trace_matrix(op.matrix(), op.shape(), keep),
                           op.shape().select(positions));
}

// ---------------------------------------------------------------------------
// Embedding and reordering
// ---------------------------------------------------------------------------

/// Embed `op` (acting on the subsystems named by `op_labels`, in that order)
/// into the full space described by `shape`, as op (x) identity. The label
/// order of `op_labels` must match their relative order inside `shape`.
inline Matrix embed_matrix(const Matrix& op, const std::vector<std::string>& op_labels,
                           const SubsystemShape& shape) {
    const auto positions = shape.positions_of(op_labels);
    // positions_of sorts; verify the caller's label order agrees with shape order
    std::vector<std::string> in_shape_order;
    for (auto p : positions) in_shape_order.push_back(shape.labels()[p]);
    if (in_shape_order != op_labels)
        throw ShapeMismatch("embed: operator label order must match the host shape order");
    IndexSplit split(shape, positions);
    if (op.rows() != split.sub_dim())
        throw ShapeMismatch("embed: operator dimension does not match named subsystems");
    const long long dk = split.sub_dim();
    const long long dc = split.comp_dim();
    Matrix out = Matrix::Zero(shape.total_dim(), shape.total_dim());
    for (long long a = 0; a < dk; ++a)
        for (long long b = 0; b < dk; ++b) {
            const Complex v = op(a, b);
            if (v == Complex(0.0, 0.0)) continue;
            for (long long c = 0; c < dc; ++c) out(split.global(a, c), split.global(b, c)) = v;
        }
    return out;
}

/// Rearrange subsystems into `new_order`; returns the permuted matrix.
inline Matrix permute_subsystems(const Matrix& m, const SubsystemShape& shape,
                                 const std::vector<std::string>& new_order) {
    const auto map = reorder_index_map(shape, new_order);
    const long long d = shape.total_dim();
    Matrix out(d, d);
    for (long long i = 0; i < d; ++i)
        for (long long j = 0; j < d; ++j)
            out(i, j) = m(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
    return out;
}

// ---------------------------------------------------------------------------
// Hermitian matrix functions
// ---------------------------------------------------------------------------

enum class LogPolicy { clip, strict };

/// f applied to the eigenvalues of (M + M^dag)/2 in its eigenbasis.
inline Matrix hermitian_fn_matrix(const Matrix& m, const std::function<double(double)>& f) {
    Matrix h = 0.5 * (m + m.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw SolverFailure("hermitian_fn: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    Eigen::VectorXd fe(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) fe[i] = f(ev[i]);
    return es.eigenvectors() * fe.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline HermitianObservable hermitian_fn(const HermitianObservable& h,
                                        const std::function<double(double)>& f) {
    return HermitianObservable(hermitian_fn_matrix(h.matrix(), f), h.shape());
}

inline Matrix matrix_exp(const Matrix& m) {
    return hermitian_fn_matrix(m, [](double x) { return std::exp(x); });
}

/// Matrix logarithm of a PSD operator. Under the clip policy eigenvalues are
/// floored at eig_floor; under strict, any eigenvalue at or below the floor
/// raises SingularLog.
inline Matrix matrix_log(const Matrix& m, LogPolicy policy = LogPolicy::clip) {
    Matrix h = 0.5 * (m + m.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw SolverFailure("matrix_log: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    Eigen::VectorXd fe(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] <= tol::eig_floor) {
            if (policy == LogPolicy::strict)
                throw SingularLog("matrix_log: eigenvalue " + std::to_string(ev[i]) +
                                  " at or below the floor");
            fe[i] = std::log(tol::eig_floor);
        } else {
            fe[i] = std::log(ev[i]);
        }
    }
    return es.eigenvectors() * fe.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Square root of a PSD operator; small negative eigenvalues map to zero.
inline Matrix matrix_sqrt(const Matrix& m) {
    return hermitian_fn_matrix(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

inline double operator_norm_matrix(const Matrix& m) {
    Matrix h = 0.5 * (m + m.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double trace_norm_matrix(const Matrix& m) {
    Matrix h = 0.5 * (m + m.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

inline double operator_norm(const HermitianObservable& h) {
    return operator_norm_matrix(h.matrix());
}

inline double trace_norm(const HermitianObservable& h) { return trace_norm_matrix(h.matrix()); }

}  // namespace qgen
