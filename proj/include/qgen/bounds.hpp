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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qgen/cqdata.hpp"
#include "qgen/entropy.hpp"
#include "qgen/mgf.hpp"

namespace qgen {

// ---------------------------------------------------------------------------
// Losses and reports
// ---------------------------------------------------------------------------

/// Family of loss observables on test (x) hyp, optionally with a declared
/// local average structure L = (1/m) sum_i L_i.
struct LossFamily {
    std::function<HermitianObservable(int s, int w)> observable;

    struct LocalStructure {
        int sites = 0;
        double max_local_norm = 0.0;
        /// Local observable at (site, symbol, hypothesis) on test_i (x) hyp_i;
        /// may be null when only the norm metadata is known.
        std::function<HermitianObservable(int site, int symbol, int hyp)> local_observable;
    };
    std::optional<LocalStructure> local;
};

struct RiskReport {
    double empirical = 0.0;
    double true_risk = 0.0;
    double gen = 0.0;  // true_risk - empirical
};

enum class BoundKind { thm21, cor22, cor24, cor26 };

inline const char* bound_name(BoundKind k) {
    switch (k) {
        case BoundKind::thm21: return "thm21";
        case BoundKind::cor22: return "cor22";
        case BoundKind::cor24: return "cor24";
        case BoundKind::cor26: return "cor26";
    }
    return "?";
}

struct BoundCertificate {
    double gen_abs = 0.0;
    BoundKind bound = BoundKind::cor22;
    double qmi_term = 0.0;     // nats
    double holevo_term = 0.0;  // nats
    double mi_term = 0.0;      // nats
    std::optional<SubGaussianFit> alpha;
    std::optional<SubGaussianFit> beta;
    double rhs = 0.0;
    bool holds = false;
    double slack = 0.0;  // rhs - gen_abs; holds iff slack >= -cert_slack
};

// ---------------------------------------------------------------------------
// Pipeline evaluation cache
// ---------------------------------------------------------------------------

/// One full evaluation of the learner on the ensemble: the induced joint
/// distribution and the output states sigma(s, w) wherever the conditional
/// outcome probability clears the floor.
struct PipelineData {
    JointDistribution joint;
    std::vector<std::vector<std::optional<DensityOperator>>> sigma;  // [s][w]
    std::vector<std::vector<double>> outcome_prob;                   // Q_s(w)
};

inline PipelineData evaluate_pipeline(const CQEnsemble& ens, const Learner& lr) {
    const std::size_t n_s = ens.size();
    const std::size_t n_w = lr.n_hypotheses();
    if (static_cast<long long>(n_s) * static_cast<long long>(n_w) > caps::enum_pairs)
        throw EnumerationCap("pipeline enumeration of " + std::to_string(n_s * n_w) +
                             " pairs exceeds the cap");
    PipelineData data{learner_joint(ens, lr), {}, {}};
    data.sigma.resize(n_s);
    data.outcome_prob.assign(n_s, std::vector<double>(n_w, 0.0));
    for (std::size_t s = 0; s < n_s; ++s) {
        data.sigma[s].resize(n_w);
        const Matrix rho_train = ens.train_marginal(s).matrix();
        for (std::size_t w = 0; w < n_w; ++w) {
            const double q =
                (lr.povm_for[s].effects()[w].matrix() * rho_train).trace().real();
            data.outcome_prob[s][w] = q;
            if (q > tol::p_floor)
                data.sigma[s][w] = learner_output_state(ens, lr, static_cast<int>(s),
                                                        static_cast<int>(w));
        }
    }
    return data;
}

namespace detail {

inline DensityOperator trivial_hyp_state(const SubsystemShape& hyp_shape) {
    return DensityOperator(identity_matrix(1), hyp_shape);
}

/// sigma_hyp(s, w) for the true-risk double sum. For a trivial hypothesis
/// register this never requires conditioning; otherwise the pair must carry
/// outcome probability above the floor.
inline std::optional<DensityOperator> hyp_marginal_or_skip(const CQEnsemble& ens,
                                                           const Learner& lr,
                                                           const PipelineData& data, std::size_t s,
                                                           std::size_t w) {
    if (lr.hyp_shape.total_dim() == 1) return trivial_hyp_state(lr.hyp_shape);
    if (!data.sigma[s][w].has_value()) return std::nullopt;
    return partial_trace(*data.sigma[s][w], lr.hyp_shape.labels());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Risks
// ---------------------------------------------------------------------------

inline double expected_empirical_risk(const CQEnsemble& ens, const Learner& lr,
                                      const LossFamily& loss, const PipelineData& data) {
    double acc = 0.0;
    for (std::size_t s = 0; s < ens.size(); ++s)
        for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
            const double p = data.joint(static_cast<Eigen::Index>(s),
                                        static_cast<Eigen::Index>(w));
            if (p <= tol::p_floor) continue;
            const auto l = loss.observable(static_cast<int>(s), static_cast<int>(w));
            acc += p * (l.matrix() * data.sigma[s][w]->matrix()).trace().real();
        }
    return acc;
}

inline double expected_empirical_risk(const CQEnsemble& ens, const Learner& lr,
                                      const LossFamily& loss) {
    return expected_empirical_risk(ens, lr, loss, evaluate_pipeline(ens, lr));
}

/// Double sum over independently redrawn data and hypothesis. Pairs whose
/// conditional outcome probability vanishes are skipped; the skipped product
/// mass must stay within tolerance.
inline double expected_true_risk(const CQEnsemble& ens, const Learner& lr,
                                 const LossFamily& loss, const PipelineData& data) {
    const auto p_w = data.joint.hyp_marginal();
    double acc = 0.0;
    double skipped_mass = 0.0;
    for (std::size_t s = 0; s < ens.size(); ++s) {
        const double ps = ens.entries()[s].prob;
        const DensityOperator rho_test = ens.test_marginal(s);
        for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
            const double weight = ps * p_w[static_cast<Eigen::Index>(w)];
            if (weight <= tol::p_floor) continue;
            auto hyp = detail::hyp_marginal_or_skip(ens, lr, data, s, w);
            if (!hyp.has_value()) {
                skipped_mass += weight;
                continue;
            }
            const auto tau = tensor_product(rho_test, *hyp);
            const auto l = loss.observable(static_cast<int>(s), static_cast<int>(w));
            acc += weight * (l.matrix() * tau.matrix()).trace().real();
        }
    }
    if (skipped_mass > tol::mass_deficit)
        throw ZeroProbabilityOutcome("expected_true_risk: undefined hypothesis marginals carry "
                                     "product mass " +
                                     std::to_string(skipped_mass));
    return acc;
}

inline double expected_true_risk(const CQEnsemble& ens, const Learner& lr,
                                 const LossFamily& loss) {
    return expected_true_risk(ens, lr, loss, evaluate_pipeline(ens, lr));
}

inline RiskReport generalization_error(const CQEnsemble& ens, const Learner& lr,
                                       const LossFamily& loss, const PipelineData& data) {
    RiskReport r;
    r.empirical = expected_empirical_risk(ens, lr, loss, data);
    r.true_risk = expected_true_risk(ens, lr, loss, data);
    r.gen = r.true_risk - r.empirical;
    return r;
}

inline RiskReport generalization_error(const CQEnsemble& ens, const Learner& lr,
                                       const LossFamily& loss) {
    return generalization_error(ens, lr, loss, evaluate_pipeline(ens, lr));
}

// ---------------------------------------------------------------------------
// Information terms
// ---------------------------------------------------------------------------

/// E_{(S,W)} [ I(test; hyp)_{sigma(S,W)} ].
inline double qmi_term(const CQEnsemble& ens, const Learner& lr, const PipelineData& data) {
    if (lr.hyp_shape.total_dim() == 1) return 0.0;
    double acc = 0.0;
    for (std::size_t s = 0; s < ens.size(); ++s)
        for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
            const double p = data.joint(static_cast<Eigen::Index>(s),
                                        static_cast<Eigen::Index>(w));
            if (p <= tol::p_floor) continue;
            acc += p * qmi(*data.sigma[s][w], ens.test_labels());
        }
    return acc;
}

/// E_S [ chi({P(w|S), post-measurement test marginals}) ].
inline double holevo_term(const CQEnsemble& ens, const Learner& lr, const PipelineData& data) {
    double acc = 0.0;
    for (std::size_t s = 0; s < ens.size(); ++s) {
        const double ps = ens.entries()[s].prob;
        if (ps <= tol::p_floor) continue;
        std::vector<std::pair<double, DensityOperator>> items;
        for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
            const double q = data.outcome_prob[s][w];
            if (q <= tol::p_floor) continue;
            items.emplace_back(q, partial_trace(*data.sigma[s][w], ens.test_labels()));
        }
        acc += ps * holevo_information(EnsembleOfStates(items));
    }
    return acc;
}

inline double mi_term(const PipelineData& data) { return classical_mi(data.joint); }

/// Per-site quantum information sum used by the factorized bound:
/// E_{(S,W)} [ sum_i I(test; hyp)_{sigma_i(Z_i, W)} ].
inline double qmi_term_factorized(const CQEnsemble& ens, const Learner& lr,
                                  const PipelineData& data) {
    if (lr.hyp_shape.total_dim() == 1) return 0.0;
    if (!lr.factorized.has_value())
        throw NotFactorized("per-site information requires a factorized declaration");
    const auto& fac = *lr.factorized;
    if (!fac.local_state || !fac.local_effect)
        throw NotFactorized("factorized declaration lacks local states or effects");
    double acc = 0.0;
    for (std::size_t s = 0; s < ens.size(); ++s) {
        const auto& record = ens.entries()[s].record;
        if (static_cast<int>(record.size()) != fac.sites)
            throw NotFactorized("record length does not match the declared sites");
        for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
            const double p = data.joint(static_cast<Eigen::Index>(s),
                                        static_cast<Eigen::Index>(w));
            if (p <= tol::p_floor) continue;
            for (int site = 0; site < fac.sites; ++site) {
                const int z = record[static_cast<std::size_t>(site)];
                DensityOperator local = fac.local_state(site, z);
                EffectOperator eff = fac.local_effect(site, z, static_cast<int>(w));
                const SubsystemShape& ls = local.shape();
                // local post-measurement state, then the local channel
                std::vector<std::string> train_label = {ls.labels().back()};
                const double q =
                    (embed_matrix(eff.matrix(), train_label, ls) * local.matrix())
                        .trace()
                        .real();
                if (q <= tol::p_floor) continue;
                if (!fac.local_channel)
                    throw NotFactorized("factorized declaration lacks local channels");
                Matrix se = embed_matrix(matrix_sqrt(eff.matrix()), train_label, ls);
                DensityOperator post(se * local.matrix() * se / q, ls);
                DensityOperator sigma_i = apply_channel(
                    post, fac.local_channel(site, z, static_cast<int>(w)), train_label);
                acc += p * qmi(sigma_i, {sigma_i.shape().labels().front()});
            }
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// MGF validation
// ---------------------------------------------------------------------------

namespace detail {

/// Check that the supplied side bounds dominate the measured quantum log-MGF
/// profile of every enumerated (s, w) pair, and the classical profiles per w.
inline void validate_mgf_domination(const CQEnsemble& ens, const Learner& lr,
                                    const LossFamily& loss, const PipelineData& data,
                                    const std::function<double(double)>& psi_plus,
                                    const std::function<double(double)>& psi_minus,
                                    const std::function<double(double)>& phi_plus,
                                    const std::function<double(double)>& phi_minus) {
    const auto grid = default_lambda_grid();
    const auto p_w = data.joint.hyp_marginal();

    for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
        std::vector<std::pair<double, double>> classical;
        for (std::size_t s = 0; s < ens.size(); ++s) {
            const double ps = ens.entries()[s].prob;
            if (ps <= tol::p_floor) continue;
            auto hyp = hyp_marginal_or_skip(ens, lr, data, s, w);
            if (!hyp.has_value()) continue;  // mass accounting handled by the risk pass
            const auto tau = tensor_product(ens.test_marginal(s), *hyp);
            const auto l = loss.observable(static_cast<int>(s), static_cast<int>(w));
            classical.emplace_back(ps, (l.matrix() * tau.matrix()).trace().real());

            const double p = data.joint(static_cast<Eigen::Index>(s),
                                        static_cast<Eigen::Index>(w));
            if (p <= tol::p_floor) continue;
            auto spectrum = qgen::detail::center_against(tau.matrix(), l.matrix());
            for (double lam : grid) {
                if (lam == 0.0) continue;
                const double measured = spectrum.log_mgf(lam);
                const double cap = lam >= 0.0 ? psi_plus(lam) : psi_minus(lam);
                if (measured > cap + 1e-9)
                    throw InvalidMgfBound(
                        "quantum log-MGF bound violated at lambda = " + std::to_string(lam) +
                        ": measured " + std::to_string(measured) + " > bound " +
                        std::to_string(cap));
            }
        }
        if (p_w[static_cast<Eigen::Index>(w)] <= tol::p_floor) continue;
        double mass = 0.0;
        for (auto& [p, x] : classical) mass += p;
        if (mass <= tol::p_floor) continue;
        for (auto& [p, x] : classical) p /= mass;
        for (double lam : grid) {
            if (lam == 0.0) continue;
            const double measured = classical_log_mgf(classical, lam);
            const double cap = lam >= 0.0 ? phi_plus(lam) : phi_minus(lam);
            if (measured > cap + 1e-9)
                throw InvalidMgfBound(
                    "classical log-MGF bound violated at lambda = " + std::to_string(lam) +
                    ": measured " + std::to_string(measured) + " > bound " +
                    std::to_string(cap));
        }
    }
}

inline BoundCertificate finish_certificate(BoundCertificate cert, double gen) {
    cert.gen_abs = std::abs(gen);
    cert.slack = cert.rhs - cert.gen_abs;
    cert.holds = cert.slack >= -tol::cert_slack;
    return cert;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bound evaluators
// ---------------------------------------------------------------------------

/// General information bound with caller-supplied convex side bounds
/// (validated against the measured profiles). The sign asymmetry is honored:
/// +gen is inverted through (psi_minus, phi_minus), -gen through
/// (psi_plus, phi_plus); the reported rhs is the side matching sign(gen).
inline BoundCertificate bound_general(const CQEnsemble& ens, const Learner& lr,
                                      const LossFamily& loss, const PipelineData& data,
                                      const std::function<double(double)>& psi_plus,
                                      const std::function<double(double)>& psi_minus,
                                      const std::function<double(double)>& phi_plus,
                                      const std::function<double(double)>& phi_minus) {
    detail::validate_mgf_domination(ens, lr, loss, data, psi_plus, psi_minus, phi_plus,
                                    phi_minus);
    BoundCertificate cert;
    cert.bound = BoundKind::thm21;
    cert.qmi_term = qmi_term(ens, lr, data);
    cert.holevo_term = holevo_term(ens, lr, data);
    cert.mi_term = mi_term(data);

    const double quantum_info = cert.qmi_term + cert.holevo_term;
    const double rhs_plus =
        legendre_dual_inverse(psi_minus, quantum_info) + legendre_dual_inverse(phi_minus, cert.mi_term);
    const double rhs_minus =
        legendre_dual_inverse(psi_plus, quantum_info) + legendre_dual_inverse(phi_plus, cert.mi_term);

    const RiskReport risks = generalization_error(ens, lr, loss, data);
    cert.rhs = risks.gen >= 0.0 ? rhs_plus : rhs_minus;
    cert.gen_abs = std::abs(risks.gen);
    const bool plus_ok = risks.gen <= rhs_plus + tol::cert_slack;
    const bool minus_ok = -risks.gen <= rhs_minus + tol::cert_slack;
    cert.slack = cert.rhs - cert.gen_abs;
    cert.holds = plus_ok && minus_ok;
    return cert;
}

/// Sub-gaussian two-term bound: sqrt(2 a^2 (QMI + Holevo)) + sqrt(2 b^2 MI).
inline BoundCertificate bound_cor22(const CQEnsemble& ens, const Learner& lr,
                                    const LossFamily& loss, const PipelineData& data,
                                    double alpha, double beta, bool validate = true) {
    if (validate) {
        auto psi = [alpha](double l) { return 0.5 * alpha * alpha * l * l; };
        auto phi = [beta](double l) { return 0.5 * beta * beta * l * l; };
        detail::validate_mgf_domination(ens, lr, loss, data, psi, psi, phi, phi);
    }
    BoundCertificate cert;
    cert.bound = BoundKind::cor22;
    cert.qmi_term = qmi_term(ens, lr, data);
    cert.holevo_term = holevo_term(ens, lr, data);
    cert.mi_term = mi_term(data);
    cert.alpha = SubGaussianFit{alpha, 0.0, MgfMode::quantum, true};
    cert.beta = SubGaussianFit{beta, 0.0, MgfMode::classical, true};
    cert.rhs = std::sqrt(2.0 * alpha * alpha * (cert.qmi_term + cert.holevo_term)) +
               std::sqrt(2.0 * beta * beta * cert.mi_term);
    return detail::finish_certificate(cert, generalization_error(ens, lr, loss, data).gen);
}

/// Factorized-data bound with per-site sub-gaussian parameters; the quantum
/// information term becomes the per-site sum. Classical-hypothesis learners
/// need no POVM factorization.
inline BoundCertificate bound_cor24(const CQEnsemble& ens, const Learner& lr,
                                    const LossFamily& loss, const PipelineData& data,
                                    const std::vector<double>& local_alphas,
                                    const std::vector<double>& local_betas,
                                    bool validate = true) {
    if (!loss.local.has_value())
        throw NotFactorized("bound_cor24: loss carries no local structure");
    const int m = loss.local->sites;
    if (static_cast<int>(local_alphas.size()) != m ||
        static_cast<int>(local_betas.size()) != m)
        throw NotFactorized("bound_cor24: one local parameter per site required");
    const bool classical_hyp = lr.hyp_shape.total_dim() == 1;
    if (!classical_hyp && !lr.factorized.has_value())
        throw NotFactorized("bound_cor24: quantum hypotheses require factorized declarations");

    const double alpha = compose_local_subgaussian(local_alphas, m);
    const double beta = compose_local_subgaussian(local_betas, m);
    if (validate) {
        auto psi = [alpha](double l) { return 0.5 * alpha * alpha * l * l; };
        auto phi = [beta](double l) { return 0.5 * beta * beta * l * l; };
        detail::validate_mgf_domination(ens, lr, loss, data, psi, psi, phi, phi);
    }

    BoundCertificate cert;
    cert.bound = BoundKind::cor24;
    cert.qmi_term = classical_hyp ? 0.0 : qmi_term_factorized(ens, lr, data);
    cert.holevo_term = holevo_term(ens, lr, data);
    cert.mi_term = mi_term(data);
    cert.alpha = SubGaussianFit{alpha, 0.0, MgfMode::quantum, true};
    cert.beta = SubGaussianFit{beta, 0.0, MgfMode::classical, true};
    cert.rhs = std::sqrt(2.0 * alpha * alpha * (cert.qmi_term + cert.holevo_term)) +
               std::sqrt(2.0 * beta * beta * cert.mi_term);
    return detail::finish_certificate(cert, generalization_error(ens, lr, loss, data).gen);
}

/// Lipschitz-stability bound: the prefactor 2 sqrt(2) max ||L_i|| / sqrt(m)
/// multiplies sqrt(C1 (QMI + Holevo)) + sqrt((1 + C1 (1 + C2)) MI).
inline BoundCertificate bound_cor26(const CQEnsemble& ens, const Learner& lr,
                                    const LossFamily& loss, const PipelineData& data, double c1,
                                    double c2, double max_local_norm) {
    if (!loss.local.has_value())
        throw NotFactorized("bound_cor26: loss carries no local structure");
    const bool classical_hyp = lr.hyp_shape.total_dim() == 1;
    if (!classical_hyp && !lr.factorized.has_value())
        throw NotFactorized("bound_cor26: quantum hypotheses require factorized declarations");
    const double m = static_cast<double>(loss.local->sites);

    BoundCertificate cert;
    cert.bound = BoundKind::cor26;
    cert.qmi_term = qmi_term(ens, lr, data);
    cert.holevo_term = holevo_term(ens, lr, data);
    cert.mi_term = mi_term(data);
    const double prefactor = 2.0 * std::sqrt(2.0) * max_local_norm / std::sqrt(m);
    cert.rhs = prefactor * (std::sqrt(c1 * (cert.qmi_term + cert.holevo_term)) +
                            std::sqrt((1.0 + c1 * (1.0 + c2)) * cert.mi_term));
    return detail::finish_certificate(cert, generalization_error(ens, lr, loss, data).gen);
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

struct CertifyInputs {
    // cor22
    double alpha = 0.0;
    double beta = 0.0;
    // cor24
    std::vector<double> local_alphas;
    std::vector<double> local_betas;
    // cor26
    double c1 = 1.0;
    double c2 = 0.0;
    double max_local_norm = 0.0;
    // thm21
    std::function<double(double)> psi_plus, psi_minus, phi_plus, phi_minus;
    bool validate = true;
};

inline BoundCertificate certify(const CQEnsemble& ens, const Learner& lr, const LossFamily& loss,
                                BoundKind which, const CertifyInputs& inputs,
                                const PipelineData& data) {
    switch (which) {
        case BoundKind::thm21:
            return bound_general(ens, lr, loss, data, inputs.psi_plus, inputs.psi_minus,
                                 inputs.phi_plus, inputs.phi_minus);
        case BoundKind::cor22:
            return bound_cor22(ens, lr, loss, data, inputs.alpha, inputs.beta, inputs.validate);
        case BoundKind::cor24:
            return bound_cor24(ens, lr, loss, data, inputs.local_alphas, inputs.local_betas,
                               inputs.validate);
        case BoundKind::cor26:
            return bound_cor26(ens, lr, loss, data, inputs.c1, inputs.c2,
                               inputs.max_local_norm);
    }
    throw Error("certify: unknown bound selector");
}

inline BoundCertificate certify(const CQEnsemble& ens, const Learner& lr, const LossFamily& loss,
                                BoundKind which, const CertifyInputs& inputs) {
    return certify(ens, lr, loss, which, inputs, evaluate_pipeline(ens, lr));
}

/// Fit certified sub-gaussian parameters directly from the measured profiles:
/// alpha over all enumerated (s, w) quantum profiles, beta over the per-w
/// classical profiles.
inline std::pair<double, double> fit_pipeline_subgaussian(const CQEnsemble& ens,
                                                          const Learner& lr,
                                                          const LossFamily& loss,
                                                          const PipelineData& data) {
    double alpha = 0.0;
    double beta = 0.0;
    const auto p_w = data.joint.hyp_marginal();
    for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
        std::vector<std::pair<double, double>> classical;
        for (std::size_t s = 0; s < ens.size(); ++s) {
            const double ps = ens.entries()[s].prob;
            if (ps <= tol::p_floor) continue;
            auto hyp = detail::hyp_marginal_or_skip(ens, lr, data, s, w);
            if (!hyp.has_value()) continue;
            const auto tau = tensor_product(ens.test_marginal(s), *hyp);
            const auto l = loss.observable(static_cast<int>(s), static_cast<int>(w));
            classical.emplace_back(ps, (l.matrix() * tau.matrix()).trace().real());
            const double p = data.joint(static_cast<Eigen::Index>(s),
                                        static_cast<Eigen::Index>(w));
            if (p <= tol::p_floor) continue;
            alpha = std::max(alpha, fit_subgaussian(quantum_profile(tau, l)).alpha);
        }
        if (p_w[static_cast<Eigen::Index>(w)] <= tol::p_floor || classical.empty()) continue;
        double mass = 0.0;
        for (auto& [p, x] : classical) mass += p;
        for (auto& [p, x] : classical) p /= mass;
        beta = std::max(beta, fit_subgaussian(classical_profile(classical)).alpha);
    }
    return {alpha, beta};
}

}  // namespace qgen
