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

#include "qgen/scenario_types.hpp"

namespace qgen {

/// Learning a POVM that estimates an unknown parameter: the data carries m
/// parameter draws with per-copy state copies, each hypothesis w is a POVM
/// family {F_w(z-hat)} over the parameter grid, and the loss is the p-norm
/// estimation error weighted by the hypothesis POVM on a test copy.
struct ParameterEstimationConfig {
    int d = 2;
    int m = 1;
    int m_test = 1;
    double p_norm = 2.0;
    /// Parameter grid with probabilities: (prob, theta vector).
    std::vector<std::pair<double, Eigen::VectorXd>> thetas;
    /// State map z -> rho(z), aligned with the grid.
    std::vector<Matrix> states;
    /// Hypothesis POVMs: hyp_povms[w][zhat] acts on (C^d)^(x m_test).
    std::vector<std::vector<Matrix>> hyp_povms;
    enum class Rule { erm, fixedFirst } rule = Rule::erm;
};

namespace pe_detail {

inline double p_norm_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(acc, 1.0 / p);
}

/// Expected loss of hypothesis w on parameter z: sum over estimates of the
/// p-norm error weighted by the POVM outcome probability on the test copies.
inline double expected_loss(const ParameterEstimationConfig& cfg, const Matrix& rho_test_copies,
                            int z, int w) {
    double acc = 0.0;
    for (std::size_t zh = 0; zh < cfg.thetas.size(); ++zh) {
        const double dist = p_norm_dist(cfg.thetas[static_cast<std::size_t>(z)].second,
                                        cfg.thetas[zh].second, cfg.p_norm);
        acc += dist *
               (cfg.hyp_povms[static_cast<std::size_t>(w)][zh] * rho_test_copies).trace().real();
    }
    return acc;
}

}  // namespace pe_detail

/// p-norm diameter of the parameter grid.
inline double parameter_diameter(const ParameterEstimationConfig& cfg) {
    double b = 0.0;
    for (std::size_t i = 0; i < cfg.thetas.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.thetas.size(); ++j)
            b = std::max(b, pe_detail::p_norm_dist(cfg.thetas[i].second, cfg.thetas[j].second,
                                                   cfg.p_norm));
    return b;
}

inline BuiltScenario build_parameter_estimation(const ParameterEstimationConfig& cfg) {
    const int n_theta = static_cast<int>(cfg.thetas.size());
    if (n_theta < 1) throw ConfigError("parameterEstimation: empty parameter grid");
    if (cfg.m < 1) throw ConfigError("parameterEstimation: m must be positive");
    if (cfg.m_test < 1) throw ConfigError("parameterEstimation: m_test must be positive");
    if (static_cast<int>(cfg.states.size()) != n_theta)
        throw ConfigError("parameterEstimation: one state per grid point required");
    if (cfg.hyp_povms.empty()) throw ConfigError("parameterEstimation: no hypothesis POVMs");
    const int n_w = static_cast<int>(cfg.hyp_povms.size());

    long long test_dim = 1;
    for (int t = 0; t < cfg.m_test; ++t) test_dim *= cfg.d;
    for (const auto& povm : cfg.hyp_povms) {
        if (static_cast<int>(povm.size()) != n_theta)
            throw ConfigError("parameterEstimation: hypothesis POVMs must run over the grid");
        Matrix sum = Matrix::Zero(test_dim, test_dim);
        for (const auto& f : povm) sum += f;
        if ((sum - identity_matrix(test_dim)).cwiseAbs().maxCoeff() > tol::povm)
            throw ConfigError("parameterEstimation: hypothesis POVM does not sum to identity");
    }

    long long n_records = 1;
    for (int i = 0; i < cfg.m; ++i) {
        n_records *= n_theta;
        if (n_records * n_w > caps::enum_pairs)
            throw ConfigError("parameterEstimation: record grid exceeds the enumeration cap of " +
                              std::to_string(caps::enum_pairs));
    }
    double dim_total = 1.0;
    for (int i = 0; i < cfg.m * (cfg.m_test + 1); ++i) dim_total *= cfg.d;
    if (dim_total > 4096.0)
        throw ConfigError("parameterEstimation: total dimension too large; reduce m or m_test");

    double mass = 0.0;
    for (const auto& [p, theta] : cfg.thetas) {
        if (p < 0.0) throw ConfigError("parameterEstimation: negative probability");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw ConfigError("parameterEstimation: grid probabilities must sum to 1");

    // per-copy labels: test_i carries m_test state copies, train_i one copy
    std::vector<std::string> labels, test_labels, train_labels;
    std::vector<int> dims;
    for (int i = 0; i < cfg.m; ++i) {
        test_labels.push_back("test" + std::to_string(i));
        labels.push_back(test_labels.back());
        dims.push_back(static_cast<int>(test_dim));
        train_labels.push_back("train" + std::to_string(i));
        labels.push_back(train_labels.back());
        dims.push_back(cfg.d);
    }
    SubsystemShape data_shape(labels, dims);

    const auto record_digits = [n_theta](long long rec, int m) {
        std::vector<int> z(static_cast<std::size_t>(m));
        for (int i = m - 1; i >= 0; --i) {
            z[static_cast<std::size_t>(i)] = static_cast<int>(rec % n_theta);
            rec /= n_theta;
        }
        return z;
    };

    const auto test_copies_state = [&](int z) {
        Matrix t = Matrix::Identity(1, 1);
        for (int c = 0; c < cfg.m_test; ++c) t = kron(t, cfg.states[static_cast<std::size_t>(z)]);
        return t;
    };

    std::vector<CqEntry> entries;
    for (long long rec = 0; rec < n_records; ++rec) {
        auto z = record_digits(rec, cfg.m);
        double prob = 1.0;
        Matrix state = Matrix::Identity(1, 1);
        std::string label;
        for (int i = 0; i < cfg.m; ++i) {
            const int zi = z[static_cast<std::size_t>(i)];
            prob *= cfg.thetas[static_cast<std::size_t>(zi)].first;
            state = kron(state, kron(test_copies_state(zi), cfg.states[static_cast<std::size_t>(zi)]));
            if (i) label += ",";
            label += std::to_string(zi);
        }
        entries.push_back({label, z, prob, DensityOperator(state, data_shape)});
    }
    CQEnsemble ens(std::move(entries), test_labels, train_labels);

    // Deterministic ERM learner over the known parameter-state map: the
    // winning hypothesis minimizes the expected estimation loss on the record.
    SubsystemShape train_shape;
    {
        std::vector<int> td(static_cast<std::size_t>(cfg.m), cfg.d);
        train_shape = SubsystemShape(train_labels, td);
    }
    auto cfg_copy = std::make_shared<ParameterEstimationConfig>(cfg);
    Learner lr;
    lr.hyp_shape = SubsystemShape({"hyp"}, {1});
    for (long long rec = 0; rec < n_records; ++rec) {
        auto z = record_digits(rec, cfg.m);
        int winner = 0;
        if (cfg.rule == ParameterEstimationConfig::Rule::erm) {
            double best = std::numeric_limits<double>::infinity();
            for (int w = 0; w < n_w; ++w) {
                double risk = 0.0;
                for (int i = 0; i < cfg.m; ++i)
                    risk += pe_detail::expected_loss(
                                cfg, test_copies_state(z[static_cast<std::size_t>(i)]),
                                z[static_cast<std::size_t>(i)], w) /
                            cfg.m;
                if (risk < best - 1e-15) {
                    best = risk;
                    winner = w;
                }
            }
        }
        std::vector<EffectOperator> effects;
        for (int w = 0; w < n_w; ++w) {
            Matrix e = w == winner
                           ? identity_matrix(train_shape.total_dim())
                           : Matrix::Zero(train_shape.total_dim(), train_shape.total_dim());
            effects.emplace_back(e, train_shape);
        }
        lr.povm_for.emplace_back(std::move(effects));
    }
    lr.channel_for = [train_shape](int, int) { return Channel::trace_out(train_shape, "hyp"); };

    FactorizedDeclaration fac;
    fac.sites = cfg.m;
    const int d = cfg.d;
    fac.local_state = [cfg_copy, test_copies_state, d](int site, int z) {
        SubsystemShape s({"test" + std::to_string(site), "train" + std::to_string(site)},
                         {static_cast<int>(std::pow(d, cfg_copy->m_test)), d});
        Matrix m = kron(test_copies_state(z), cfg_copy->states[static_cast<std::size_t>(z)]);
        return DensityOperator(m, s);
    };
    lr.factorized = fac;

    // loss observable: p-norm error against the hypothesis POVM on test copy i
    SubsystemShape th_shape;
    {
        std::vector<std::string> tl = test_labels;
        tl.push_back("hyp");
        std::vector<int> td(static_cast<std::size_t>(cfg.m), static_cast<int>(test_dim));
        td.push_back(1);
        th_shape = SubsystemShape(tl, td);
    }
    const int m = cfg.m;
    LossFamily loss;
    loss.observable = [cfg_copy, th_shape, test_labels, record_digits, m](int s, int w) {
        Matrix l = Matrix::Zero(th_shape.total_dim(), th_shape.total_dim());
        auto z = record_digits(s, m);
        for (int i = 0; i < m; ++i) {
            Matrix local = Matrix::Zero(
                cfg_copy->hyp_povms[0][0].rows(), cfg_copy->hyp_povms[0][0].cols());
            for (std::size_t zh = 0; zh < cfg_copy->thetas.size(); ++zh)
                local += pe_detail::p_norm_dist(
                             cfg_copy->thetas[static_cast<std::size_t>(
                                                   z[static_cast<std::size_t>(i)])].second,
                             cfg_copy->thetas[zh].second, cfg_copy->p_norm) *
                         cfg_copy->hyp_povms[static_cast<std::size_t>(w)][zh];
            l += embed_matrix(local, {test_labels[static_cast<std::size_t>(i)]}, th_shape) /
                 static_cast<double>(m);
        }
        return HermitianObservable(l, th_shape);
    };
    const double b_p = parameter_diameter(cfg);
    LossFamily::LocalStructure ls;
    ls.sites = cfg.m;
    ls.max_local_norm = b_p;
    SubsystemShape hyp1({"hyp"}, {1});
    ls.local_observable = [cfg_copy, test_dim](int site, int z, int w) {
        Matrix local = Matrix::Zero(test_dim, test_dim);
        for (std::size_t zh = 0; zh < cfg_copy->thetas.size(); ++zh)
            local += pe_detail::p_norm_dist(cfg_copy->thetas[static_cast<std::size_t>(z)].second,
                                            cfg_copy->thetas[zh].second, cfg_copy->p_norm) *
                     cfg_copy->hyp_povms[static_cast<std::size_t>(w)][zh];
        SubsystemShape s({"test" + std::to_string(site), "hyp"},
                         {static_cast<int>(test_dim), 1});
        return HermitianObservable(local, s);
    };
    loss.local = ls;

    BuiltScenario built{std::move(ens), std::move(lr), std::move(loss), {},
                        BoundKind::cor24, {}};
    // Classical local parameters: the reported-diameter convention
    // sqrt(B_p)/2 applies while B_p <= 1 (where it dominates Hoeffding);
    // beyond that the plain Hoeffding value B_p/2 takes over.
    const double beta_local = b_p <= 1.0 ? 0.5 * std::sqrt(b_p) : 0.5 * b_p;
    built.inputs.local_alphas.assign(static_cast<std::size_t>(cfg.m), 0.5 * b_p);
    built.inputs.local_betas.assign(static_cast<std::size_t>(cfg.m), beta_local);
    built.inputs.alpha = compose_local_subgaussian(built.inputs.local_alphas, cfg.m);
    built.inputs.beta = compose_local_subgaussian(built.inputs.local_betas, cfg.m);
    built.inputs.max_local_norm = ls.max_local_norm;
    built.metadata["b_p"] = b_p;
    built.metadata["n_hypotheses"] = static_cast<double>(n_w);
    return built;
}

}  // namespace qgen
