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

#include "qgen/entropy.hpp"
#include "qgen/random_models.hpp"

using namespace qgen;

namespace {

DensityOperator ket_state(int i, int d, const std::string& label = "sys") {
    return DensityOperator(basis_projector(i, d), SubsystemShape::single(d, label));
}

DensityOperator plus_state() {
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return DensityOperator(m, SubsystemShape::single(2));
}

double binary_entropy_nats(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace

TEST_CASE("von Neumann entropy basics", "[entropy]") {
    CHECK(von_neumann_entropy(ket_state(0, 3)) == Catch::Approx(0.0).margin(1e-12));

    const int d = 4;
    DensityOperator mixed(identity_matrix(d) / d, SubsystemShape::single(d));
    CHECK(von_neumann_entropy(mixed) == Catch::Approx(std::log(static_cast<double>(d))));

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 0.25;
    diag(1, 1) = 0.75;
    DensityOperator rho(diag, SubsystemShape::single(2));
    const double expected = 0.25 * std::log(4.0) + 0.75 * std::log(4.0 / 3.0);
    CHECK(von_neumann_entropy(rho) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("relative entropy basics", "[entropy]") {
    Rng rng(8101);
    auto rho = random_density(rng, SubsystemShape::single(3));
    CHECK(relative_entropy(rho, rho) == Catch::Approx(0.0).margin(1e-10));

    DensityOperator zero = ket_state(0, 2);
    DensityOperator mixed(0.5 * identity_matrix(2), SubsystemShape::single(2));
    CHECK(relative_entropy(zero, mixed) == Catch::Approx(std::log(2.0)));

    DensityOperator one = ket_state(1, 2);
    CHECK(is_infinite(relative_entropy(zero, one)));
    CHECK(relative_entropy(zero, zero) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("relative entropy is nonnegative and dominates nothing infinite", "[entropy]") {
    Rng rng(8102);
    for (int it = 0; it < 50; ++it) {
        auto a = random_density(rng, SubsystemShape::single(4), 0.01);
        auto b = random_density(rng, SubsystemShape::single(4), 0.01);
        const double d = relative_entropy(a, b);
        CHECK(!is_infinite(d));
        CHECK(d >= 0.0);
    }
}

TEST_CASE("quantum mutual information basics", "[entropy]") {
    Rng rng(8103);
    auto a = random_density(rng, SubsystemShape::single(2, "A"));
    auto b = random_density(rng, SubsystemShape::single(3, "B"));
    auto prod = tensor_product(a, b);
    CHECK(qmi(prod, {"A"}) == Catch::Approx(0.0).margin(1e-10));

    Vector bell = Vector::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    DensityOperator bell_state(bell * bell.adjoint(), SubsystemShape({"A", "B"}, {2, 2}));
    CHECK(qmi(bell_state, {"B"}) == Catch::Approx(2.0 * std::log(2.0)).epsilon(1e-10));

    // Classically correlated pair: (|00><00| + |11><11|)/2.
    Matrix cc = Matrix::Zero(4, 4);
    cc(0, 0) = 0.5;
    cc(3, 3) = 0.5;
    DensityOperator cc_state(cc, SubsystemShape({"A", "B"}, {2, 2}));
    CHECK(qmi(cc_state, {"A"}) == Catch::Approx(std::log(2.0)).epsilon(1e-10));

    CHECK_THROWS_AS(qmi(cc_state, {"C"}), UnknownLabel);
    CHECK_THROWS_AS(qmi(cc_state, std::vector<std::string>{"A", "B"}), UnknownLabel);
}

TEST_CASE("qmi agrees with the relative entropy to the product of marginals", "[entropy]") {
    Rng rng(8104);
    SubsystemShape ab({"A", "B"}, {2, 3});
    for (int it = 0; it < 25; ++it) {
        auto rho = random_density(rng, ab, 0.01);
        auto pa = partial_trace(rho, {"A"});
        auto pb = partial_trace(rho, {"B"});
        const double via_entropies = qmi(rho, {"A"});
        const double via_divergence = relative_entropy(rho, tensor_product(pa, pb));
        CHECK(via_entropies == Catch::Approx(via_divergence).margin(1e-8));
    }
}

TEST_CASE("Holevo information basics", "[entropy]") {
    auto rho = ket_state(0, 2);
    EnsembleOfStates same({{0.5, rho}, {0.5, rho}});
    CHECK(holevo_information(same) == Catch::Approx(0.0).margin(1e-12));

    EnsembleOfStates orth({{0.5, ket_state(0, 2)}, {0.5, ket_state(1, 2)}});
    CHECK(holevo_information(orth) == Catch::Approx(std::log(2.0)).epsilon(1e-12));

    EnsembleOfStates tilted({{0.5, ket_state(0, 2)}, {0.5, plus_state()}});
    const double s2 = std::sin(std::atan(1.0) / 2.0) * std::sin(std::atan(1.0) / 2.0);  // sin^2(pi/8)
    CHECK(holevo_information(tilted) == Catch::Approx(binary_entropy_nats(s2)).epsilon(1e-10));
}

TEST_CASE("Holevo information matches the expected-divergence form", "[entropy]") {
    Rng rng(8105);
    for (int it = 0; it < 25; ++it) {
        std::vector<std::pair<double, DensityOperator>> items;
        double mass = 0.0;
        const int n = 2 + static_cast<int>(rng.below(3));
        std::vector<double> raw;
        for (int k = 0; k < n; ++k) raw.push_back(rng.uniform(0.1, 1.0));
        for (double r : raw) mass += r;
        Matrix avg = Matrix::Zero(3, 3);
        for (double r : raw) {
            auto st = random_density(rng, SubsystemShape::single(3), 0.02);
            items.emplace_back(r / mass, st);
            avg += (r / mass) * st.matrix();
        }
        EnsembleOfStates ens(items);
        DensityOperator avg_state(avg, SubsystemShape::single(3));
        double expected = 0.0;
        for (const auto& [p, st] : items) expected += p * relative_entropy(st, avg_state);
        CHECK(holevo_information(ens) == Catch::Approx(expected).margin(1e-8));
    }
}

TEST_CASE("classical mutual information basics", "[entropy]") {
    Eigen::MatrixXd independent(2, 2);
    independent << 0.12, 0.28, 0.18, 0.42;  // rank-one product
    CHECK(classical_mi(JointDistribution(independent)) == Catch::Approx(0.0).margin(1e-12));

    Eigen::MatrixXd correlated = Eigen::MatrixXd::Zero(2, 2);
    correlated(0, 0) = correlated(1, 1) = 0.5;
    CHECK(classical_mi(JointDistribution(correlated)) == Catch::Approx(std::log(2.0)));

    const double flip = 0.1;
    Eigen::MatrixXd bsc(2, 2);
    bsc << 0.5 * (1 - flip), 0.5 * flip, 0.5 * flip, 0.5 * (1 - flip);
    CHECK(classical_mi(JointDistribution(bsc)) ==
          Catch::Approx(std::log(2.0) - binary_entropy_nats(flip)).epsilon(1e-12));
}

TEST_CASE("variational certificate never exceeds the relative entropy", "[entropy]") {
    Rng rng(8106);
    SubsystemShape s = SubsystemShape::single(3);

    SECTION("H = 0 gives 0") {
        auto s1 = random_density(rng, s, 0.05);
        auto s2 = random_density(rng, s, 0.05);
        HermitianObservable zero(Matrix::Zero(3, 3), s);
        CHECK(petz_certificate(s1, s2, zero) == Catch::Approx(0.0).margin(1e-12));
    }

    SECTION("the optimizer attains the divergence") {
        for (int it = 0; it < 25; ++it) {
            auto s1 = random_density(rng, s, 0.05);
            auto s2 = random_density(rng, s, 0.05);
            Matrix h = matrix_log(s1.matrix(), LogPolicy::strict) -
                       matrix_log(s2.matrix(), LogPolicy::strict);
            const double cert = petz_certificate(s1, s2, HermitianObservable(h, s));
            CHECK(cert == Catch::Approx(relative_entropy(s1, s2)).margin(1e-9));
        }
    }

    SECTION("random observables certify from below") {
        for (int it = 0; it < 300; ++it) {
            auto s1 = random_density(rng, s, 0.02);
            auto s2 = random_density(rng, s, 0.02);
            auto h = random_hermitian(rng, s, rng.uniform(0.1, 3.0));
            const double cert = petz_certificate(s1, s2, h);
            CHECK(cert <= relative_entropy(s1, s2) + 1e-8);
        }
    }

    SECTION("strict mode rejects a rank-deficient second argument") {
        DensityOperator pure = ket_state(0, 3);
        auto s1 = random_density(rng, s, 0.05);
        auto h = random_hermitian(rng, s);
        CHECK_THROWS_AS(petz_certificate(s1, pure, h, LogPolicy::strict), SingularLog);
    }
}

TEST_CASE("Golden-Thompson inequality holds numerically", "[entropy]") {
    Rng rng(8107);
    for (int it = 0; it < 300; ++it) {
        const int d = 2 + static_cast<int>(rng.below(4));
        Matrix a = random_hermitian_matrix(rng, d, rng.uniform(0.2, 2.0));
        Matrix b = random_hermitian_matrix(rng, d, rng.uniform(0.2, 2.0));
        const double lhs = matrix_exp(a + b).trace().real();
        const double rhs = (matrix_exp(a) * matrix_exp(b)).trace().real();
        CHECK(lhs <= rhs + 1e-8 * std::abs(rhs));
    }
}

TEST_CASE("data processing contracts the relative entropy", "[entropy]") {
    Rng rng(8108);
    for (int it = 0; it < 80; ++it) {
        const int din = 3, dout = 3;
        auto a = random_density(rng, SubsystemShape::single(din), 0.02);
        auto b = random_density(rng, SubsystemShape::single(din), 0.02);
        auto kraus = random_kraus(rng, din, dout, 2 + static_cast<int>(rng.below(3)));
        Matrix la = Matrix::Zero(dout, dout);
        Matrix lb = Matrix::Zero(dout, dout);
        for (const auto& k : kraus) {
            la += k * a.matrix() * k.adjoint();
            lb += k * b.matrix() * k.adjoint();
        }
        DensityOperator qa(la, SubsystemShape::single(dout));
        DensityOperator qb(lb, SubsystemShape::single(dout));
        const double before = relative_entropy(a, b);
        const double after = relative_entropy(qa, qb);
        CHECK(after <= before + 1e-8);
    }
}
