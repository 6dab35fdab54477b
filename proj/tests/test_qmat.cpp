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

#include <catch2/catch_amalgamated.hpp>

#include "qgen/qmat.hpp"
#include "qgen/random_models.hpp"

using namespace qgen;

namespace {

Matrix pauli_z() {
    Matrix z(2, 2);
    z << 1.0, 0.0, 0.0, -1.0;
    return z;
}

DensityOperator bell_pair(const std::string& a = "A", const std::string& b = "B") {
    Vector v = Vector::Zero(4);
    v[0] = 1.0 / std::sqrt(2.0);
    v[3] = 1.0 / std::sqrt(2.0);
    return DensityOperator(v * v.adjoint(), SubsystemShape({a, b}, {2, 2}));
}

}  // namespace

TEST_CASE("subsystem shapes validate and index", "[qmat]") {
    SubsystemShape s({"test", "train"}, {2, 3});
    CHECK(s.total_dim() == 6);
    CHECK(s.index_of("train") == 1);
    CHECK_THROWS_AS(s.index_of("hyp"), UnknownLabel);
    CHECK_THROWS_AS(SubsystemShape({"a", "a"}, {2, 2}), ShapeMismatch);
    CHECK_THROWS_AS(SubsystemShape({"a"}, {0}), ShapeMismatch);
}

TEST_CASE("constructors reject invalid operators", "[qmat]") {
    SubsystemShape q = SubsystemShape::single(2);
    Matrix nh(2, 2);
    nh << 0.0, 1.0, 0.0, 0.0;  // not Hermitian
    CHECK_THROWS_AS(HermitianObservable(nh, q), InvalidOperator);

    Matrix half = 0.5 * identity_matrix(2);
    CHECK_THROWS_AS(DensityOperator(0.9 * half, q), InvalidOperator);  // trace 0.9

    Matrix neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;  // eigenvalue -0.5
    CHECK_THROWS_AS(DensityOperator(neg, q), InvalidOperator);
    CHECK_THROWS_AS(EffectOperator(2.0 * identity_matrix(2), q), InvalidOperator);

    // A tiny negative eigenvalue is clipped and renormalized, not rejected.
    Matrix nearly = half;
    nearly(1, 1) = 0.5 - 1e-12;
    nearly(0, 0) = 0.5 + 1e-12;
    DensityOperator ok(nearly / nearly.trace().real(), q);
    CHECK(std::abs(ok.matrix().trace().real() - 1.0) < 1e-14);
}

TEST_CASE("tensor product basics", "[qmat]") {
    SubsystemShape q1 = SubsystemShape::single(2, "a");
    SubsystemShape q2 = SubsystemShape::single(2, "b");
    HermitianObservable i2a(identity_matrix(2), q1);
    HermitianObservable i2b(identity_matrix(2), q2);
    auto i4 = tensor_product(i2a, i2b);
    CHECK((i4.matrix() - identity_matrix(4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(i4.shape().total_dim() == 4);

    DensityOperator k0(basis_projector(0, 2), q1);
    DensityOperator k1(basis_projector(1, 2), q2);
    auto k01 = tensor_product(k0, k1);
    CHECK(std::abs(k01.matrix()(1, 1).real() - 1.0) < 1e-15);  // |01> is index 1
    CHECK(k01.matrix().cwiseAbs().sum() == Catch::Approx(1.0));
}

TEST_CASE("trace is multiplicative under tensor products", "[qmat]") {
    Rng rng(7001);
    for (int it = 0; it < 100; ++it) {
        const int da = 2 + static_cast<int>(rng.below(3));
        const int db = 2 + static_cast<int>(rng.below(3));
        Matrix a = random_hermitian_matrix(rng, da);
        Matrix b = random_hermitian_matrix(rng, db);
        const Complex lhs = kron(a, b).trace();
        const Complex rhs = a.trace() * b.trace();
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("partial trace of a product state returns the factors", "[qmat]") {
    Rng rng(7002);
    for (int it = 0; it < 20; ++it) {
        auto rho = random_density(rng, SubsystemShape::single(2, "A"));
        auto sig = random_density(rng, SubsystemShape::single(3, "B"));
        auto both = tensor_product(rho, sig);
        auto back_a = partial_trace(both, {"A"});
        auto back_b = partial_trace(both, {"B"});
        CHECK((back_a.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((back_b.matrix() - sig.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("Bell state marginal is maximally mixed", "[qmat]") {
    auto bell = bell_pair();
    auto m = partial_trace(bell, {"A"});
    CHECK((m.matrix() - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace duality with embedded observables", "[qmat]") {
    // tr[tr_B[X] Y] = tr[X (Y (x) 1_B)]
    Rng rng(7003);
    SubsystemShape ab({"A", "B"}, {3, 2});
    for (int it = 0; it < 100; ++it) {
        Matrix x = random_hermitian_matrix(rng, 6);
        Matrix y = random_hermitian_matrix(rng, 3);
        Matrix xa = partial_trace_matrix(x, ab, {"A"});
        const Complex lhs = (xa * y).trace();
        const Complex rhs = (x * embed_matrix(y, {"A"}, ab)).trace();
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("partial trace undoes tensor product", "[qmat]") {
    Rng rng(7004);
    for (int it = 0; it < 50; ++it) {
        auto a = random_density(rng, SubsystemShape::single(3, "A"));
        auto b = random_density(rng, SubsystemShape::single(4, "B"));
        auto ab = tensor_product(a, b);
        CHECK((partial_trace(ab, {"A"}).matrix() - a.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("hermitian matrix functions", "[qmat]") {
    SECTION("exp of zero is identity") {
        Matrix z = Matrix::Zero(3, 3);
        CHECK((matrix_exp(z) - identity_matrix(3)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("log of a scalar matrix") {
        const int d = 4;
        Matrix m = identity_matrix(d) / static_cast<double>(d);
        Matrix l = matrix_log(m);
        CHECK((l + std::log(static_cast<double>(d)) * identity_matrix(d)).cwiseAbs().maxCoeff() <
              1e-12);
    }
    SECTION("exp(log(rho)) round-trips for full-rank states") {
        Rng rng(7005);
        for (int it = 0; it < 100; ++it) {
            auto rho = random_density(rng, SubsystemShape::single(4), 0.05);
            Matrix rt = matrix_exp(matrix_log(rho.matrix(), LogPolicy::strict));
            CHECK((rt - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SECTION("strict log raises on rank-deficient input") {
        Matrix p = basis_projector(0, 2);
        CHECK_THROWS_AS(matrix_log(p, LogPolicy::strict), SingularLog);
        CHECK_NOTHROW(matrix_log(p, LogPolicy::clip));
    }
}

TEST_CASE("operator and trace norms", "[qmat]") {
    SubsystemShape q = SubsystemShape::single(2);
    HermitianObservable z(pauli_z(), q);
    CHECK(operator_norm(z) == Catch::Approx(1.0));
    CHECK(trace_norm(z) == Catch::Approx(2.0));

    Rng rng(7006);
    for (int it = 0; it < 20; ++it) {
        auto rho = random_density(rng, SubsystemShape::single(5));
        CHECK(trace_norm(rho.as_observable()) == Catch::Approx(1.0).margin(1e-12));
    }
    for (int it = 0; it < 50; ++it) {
        const int d = 2 + static_cast<int>(rng.below(5));
        auto h = random_hermitian(rng, SubsystemShape::single(d));
        const double op = operator_norm(h);
        const double tr = trace_norm(h);
        CHECK(op <= tr + 1e-12);
        CHECK(tr <= d * op + 1e-12);
    }
}

TEST_CASE("trace of exp dominates the Jensen lower bound", "[qmat]") {
    Rng rng(7007);
    for (int it = 0; it < 50; ++it) {
        const int d = 2 + static_cast<int>(rng.below(4));
        Matrix h = random_hermitian_matrix(rng, d);
        const double lhs = matrix_exp(h).trace().real();
        const double rhs = d * std::exp(h.trace().real() / d);
        CHECK(lhs >= rhs - 1e-9);
    }
}

TEST_CASE("subsystem permutation round-trips and matches kron order", "[qmat]") {
    Rng rng(7008);
    SubsystemShape ab({"A", "B"}, {2, 3});
    Matrix a = random_hermitian_matrix(rng, 2);
    Matrix b = random_hermitian_matrix(rng, 3);
    Matrix m = kron(a, b);
    Matrix swapped = permute_subsystems(m, ab, {"B", "A"});
    CHECK((swapped - kron(b, a)).cwiseAbs().maxCoeff() < 1e-12);
    SubsystemShape ba({"B", "A"}, {3, 2});
    Matrix back = permute_subsystems(swapped, ba, {"A", "B"});
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedding matches explicit kron on middle subsystems", "[qmat]") {
    Rng rng(7009);
    SubsystemShape abc({"A", "B", "C"}, {2, 3, 2});
    Matrix y = random_hermitian_matrix(rng, 3);
    Matrix embedded = embed_matrix(y, {"B"}, abc);
    Matrix expected = kron(kron(identity_matrix(2), y), identity_matrix(2));
    CHECK((embedded - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK_THROWS_AS(embed_matrix(y, {"D"}, abc), UnknownLabel);
}
