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

/// Binary state classification: weighted pairs of qudit states, m labelled
/// copies, a hypothesis set of two-outcome discriminator effects F(w), and a
/// learner that measures each training copy against its group's candidate and
/// selects the empirical-risk-minimizing discriminator.
struct StateClassificationConfig {
    int d = 2;
    int m = 1;
    /// Weight table: (probability, weight of class 0).
    std::vector<std::pair<double, double>> weights = {{1.0, 0.5}};
    /// Pair table: (probability, class-0 state, class-1 state), each d x d.
    std::vector<std::tuple<double, Matrix, Matrix>> pairs;
    /// Discriminator effects F(w) on C^d; F fires = decide class 0.
    std::vector<Matrix> hypotheses;
    enum class Rule { groupErm, fixedFirst } rule = Rule::groupErm;
};

namespace sc_detail {

struct Averages {
    double p1 = 0.0;            // probability of class 1
    Matrix class_state[2];      // averaged per-copy test (x) train state per class
    Matrix marginal[2];         // averaged single-copy state per class
};

inline Averages class_averages(const StateClassificationConfig& cfg) {
    Averages avg;
    double wmass = 0.0;
    double pi0 = 0.0;
    for (const auto& [p, w0] : cfg.weights) {
        if (p < 0.0 || w0 < 0.0 || w0 > 1.0)
            throw ConfigError("stateClassification: invalid weight table entry");
        wmass += p;
        pi0 += p * w0;
    }
    if (std::abs(wmass - 1.0) > 1e-9)
        throw ConfigError("stateClassification: weight probabilities must sum to 1");
    avg.p1 = 1.0 - pi0;

    double pmass = 0.0;
    avg.class_state[0] = Matrix::Zero(cfg.d * cfg.d, cfg.d * cfg.d);
    avg.class_state[1] = Matrix::Zero(cfg.d * cfg.d, cfg.d * cfg.d);
    avg.marginal[0] = Matrix::Zero(cfg.d, cfg.d);
    avg.marginal[1] = Matrix::Zero(cfg.d, cfg.d);
    for (const auto& [p, s0, s1] : cfg.pairs) {
        pmass += p;
        avg.class_state[0] += p * kron(s0, s0);
        avg.class_state[1] += p * kron(s1, s1);
        avg.marginal[0] += p * s0;
        avg.marginal[1] += p * s1;
    }
    if (std::abs(pmass - 1.0) > 1e-9)
        throw ConfigError("stateClassification: pair probabilities must sum to 1");
    return avg;
}

/// Group of copy i among K candidate groups (round robin).
inline int group_of(int copy, int n_groups) { return copy % n_groups; }

/// Deterministic ERM over grouped per-copy outcomes. `fired[i]` records
/// whether the group's candidate effect fired on copy i, labels are the
/// classical classes. Candidates with empty groups never win unless all are
/// empty. Ties break to the lowest index.
inline int erm_winner(const std::vector<int>& labels, const std::vector<int>& fired,
                      int n_groups) {
    const int m = static_cast<int>(labels.size());
    std::vector<int> errors(static_cast<std::size_t>(n_groups), 0);
    std::vector<int> size(static_cast<std::size_t>(n_groups), 0);
    for (int i = 0; i < m; ++i) {
        const int g = group_of(i, n_groups);
        ++size[static_cast<std::size_t>(g)];
        // fired = decided class 0: an error on class 1; silence errs on class 0
        const bool err = fired[static_cast<std::size_t>(i)] == 1
                             ? labels[static_cast<std::size_t>(i)] == 1
                             : labels[static_cast<std::size_t>(i)] == 0;
        if (err) ++errors[static_cast<std::size_t>(g)];
    }
    int best = -1;
    for (int j = 0; j < n_groups; ++j) {
        if (size[static_cast<std::size_t>(j)] == 0) continue;
        if (best < 0) {
            best = j;
            continue;
        }
        // compare errors[j]/size[j] < errors[best]/size[best] exactly
        const long long lhs = static_cast<long long>(errors[static_cast<std::size_t>(j)]) *
                              size[static_cast<std::size_t>(best)];
        const long long rhs = static_cast<long long>(errors[static_cast<std::size_t>(best)]) *
                              size[static_cast<std::size_t>(j)];
        if (lhs < rhs) best = j;
    }
    return best < 0 ? 0 : best;
}

}  // namespace sc_detail

/// Assemble the dense pipeline objects. Feasible for small m only; the
/// analytic path below covers the sweep regime.
inline BuiltScenario build_state_classification(const StateClassificationConfig& cfg) {
    if (cfg.d < 2) throw ConfigError("stateClassification: d must be at least 2");
    if (cfg.m < 1) throw ConfigError("stateClassification: m must be at least 1");
    if (cfg.hypotheses.empty()) throw ConfigError("stateClassification: no hypotheses");
    if (cfg.pairs.empty()) throw ConfigError("stateClassification: no state pairs");
    const int n_w = static_cast<int>(cfg.hypotheses.size());
    const int n_records = 1 << cfg.m;
    if (static_cast<long long>(n_records) * n_w > caps::enum_pairs)
        throw ConfigError("stateClassification: record/hypothesis grid exceeds the enumeration "
                          "cap of " +
                          std::to_string(caps::enum_pairs));
    double dim_total = 1.0;
    for (int i = 0; i < 2 * cfg.m; ++i) dim_total *= cfg.d;
    if (dim_total > 4096.0)
        throw ConfigError("stateClassification: total dimension exceeds the dense-path limit; "
                          "reduce m or d");

    const auto avg = sc_detail::class_averages(cfg);

    // interleaved per-copy labels [test0, train0, test1, train1, ...]
    std::vector<std::string> labels;
    std::vector<int> dims;
    std::vector<std::string> test_labels, train_labels;
    for (int i = 0; i < cfg.m; ++i) {
        labels.push_back("test" + std::to_string(i));
        labels.push_back("train" + std::to_string(i));
        dims.push_back(cfg.d);
        dims.push_back(cfg.d);
        test_labels.push_back("test" + std::to_string(i));
        train_labels.push_back("train" + std::to_string(i));
    }
    SubsystemShape data_shape(labels, dims);
    SubsystemShape train_shape;
    {
        std::vector<int> tdims(static_cast<std::size_t>(cfg.m), cfg.d);
        train_shape = SubsystemShape(train_labels, tdims);
    }

    std::vector<CqEntry> entries;
    for (int rec = 0; rec < n_records; ++rec) {
        std::vector<int> z(static_cast<std::size_t>(cfg.m));
        double prob = 1.0;
        Matrix state = Matrix::Identity(1, 1);
        std::string label;
        for (int i = 0; i < cfg.m; ++i) {
            z[static_cast<std::size_t>(i)] = (rec >> i) & 1;
            const int zi = z[static_cast<std::size_t>(i)];
            prob *= zi == 1 ? avg.p1 : 1.0 - avg.p1;
            state = kron(state, avg.class_state[zi]);
            label += std::to_string(zi);
        }
        entries.push_back({label, z, prob, DensityOperator(state, data_shape)});
    }
    CQEnsemble ens(std::move(entries), test_labels, train_labels);

    // Learner POVMs: per-copy measurement of the group's candidate effect,
    // then deterministic classical aggregation of the fired-pattern.
    Learner lr;
    lr.hyp_shape = SubsystemShape({"hyp"}, {1});
    for (int rec = 0; rec < n_records; ++rec) {
        std::vector<Matrix> effect_mats(static_cast<std::size_t>(n_w));
        for (auto& e : effect_mats)
            e = Matrix::Zero(train_shape.total_dim(), train_shape.total_dim());
        std::vector<int> z(static_cast<std::size_t>(cfg.m));
        for (int i = 0; i < cfg.m; ++i) z[static_cast<std::size_t>(i)] = (rec >> i) & 1;
        for (int pattern = 0; pattern < (1 << cfg.m); ++pattern) {
            std::vector<int> fired(static_cast<std::size_t>(cfg.m));
            Matrix piece = Matrix::Identity(1, 1);
            for (int i = 0; i < cfg.m; ++i) {
                fired[static_cast<std::size_t>(i)] = (pattern >> i) & 1;
                const Matrix& f =
                    cfg.hypotheses[static_cast<std::size_t>(sc_detail::group_of(i, n_w))];
                piece = kron(piece, fired[static_cast<std::size_t>(i)] == 1
                                        ? f
                                        : (identity_matrix(cfg.d) - f).eval());
            }
            const int winner = cfg.rule == StateClassificationConfig::Rule::fixedFirst
                                   ? 0
                                   : sc_detail::erm_winner(z, fired, n_w);
            effect_mats[static_cast<std::size_t>(winner)] += piece;
        }
        std::vector<EffectOperator> effects;
        for (auto& e : effect_mats) effects.emplace_back(e, train_shape);
        lr.povm_for.emplace_back(std::move(effects));
    }
    lr.channel_for = [train_shape](int, int) { return Channel::trace_out(train_shape, "hyp"); };

    FactorizedDeclaration fac;
    fac.sites = cfg.m;
    auto class_state = std::make_shared<std::array<Matrix, 2>>();
    (*class_state)[0] = avg.class_state[0];
    (*class_state)[1] = avg.class_state[1];
    const int d = cfg.d;
    fac.local_state = [class_state, d](int site, int z) {
        SubsystemShape s({"test" + std::to_string(site), "train" + std::to_string(site)}, {d, d});
        return DensityOperator((*class_state)[static_cast<std::size_t>(z)], s);
    };
    lr.factorized = fac;

    // Misclassification loss: average over copies of
    // (1 - z_i)(1 - F(w)) + z_i F(w) acting on the i-th test copy.
    auto hyp_effects = std::make_shared<std::vector<Matrix>>(cfg.hypotheses);
    SubsystemShape th_shape;
    {
        std::vector<std::string> tl = test_labels;
        tl.push_back("hyp");
        std::vector<int> td(static_cast<std::size_t>(cfg.m), cfg.d);
        td.push_back(1);
        th_shape = SubsystemShape(tl, td);
    }
    const int m = cfg.m;
    LossFamily loss;
    loss.observable = [hyp_effects, th_shape, test_labels, m, d](int s, int w) {
        Matrix l = Matrix::Zero(th_shape.total_dim(), th_shape.total_dim());
        const Matrix& f = (*hyp_effects)[static_cast<std::size_t>(w)];
        for (int i = 0; i < m; ++i) {
            const int zi = (s >> i) & 1;
            Matrix local = zi == 0 ? (identity_matrix(d) - f).eval() : f;
            l += embed_matrix(local, {test_labels[static_cast<std::size_t>(i)]}, th_shape);
        }
        return HermitianObservable(l / static_cast<double>(m), th_shape);
    };
    LossFamily::LocalStructure ls;
    ls.sites = cfg.m;
    double mx = 0.0;
    for (const auto& f : cfg.hypotheses) {
        mx = std::max(mx, operator_norm_matrix(f));
        mx = std::max(mx, operator_norm_matrix(identity_matrix(cfg.d) - f));
    }
    ls.max_local_norm = mx;
    SubsystemShape hyp1({"hyp"}, {1});
    ls.local_observable = [hyp_effects, d, hyp1](int site, int z, int w) {
        const Matrix& f = (*hyp_effects)[static_cast<std::size_t>(w)];
        Matrix local = z == 0 ? (identity_matrix(d) - f).eval() : f;
        SubsystemShape s({"test" + std::to_string(site), "hyp"}, {d, 1});
        return HermitianObservable(local, s);
    };
    loss.local = ls;

    BuiltScenario built{std::move(ens), std::move(lr), std::move(loss), {},
                        BoundKind::cor24, {}};
    built.inputs.local_alphas.assign(static_cast<std::size_t>(cfg.m), 0.5);
    built.inputs.local_betas.assign(static_cast<std::size_t>(cfg.m), 0.5);
    built.inputs.alpha = 0.5 / std::sqrt(static_cast<double>(cfg.m));
    built.inputs.beta = 0.5 / std::sqrt(static_cast<double>(cfg.m));
    built.inputs.max_local_norm = ls.max_local_norm;
    built.inputs.c1 = 1.0;
    built.inputs.c2 = 0.0;
    built.metadata["n_hypotheses"] = static_cast<double>(n_w);
    return built;
}

// ---------------------------------------------------------------------------
// Exact analytics for the symmetric sweep regime
// ---------------------------------------------------------------------------

struct StateClassificationAnalytics {
    double mi = 0.0;           // I(S; W) in nats
    double empirical = 0.0;
    double true_risk = 0.0;
    double gen = 0.0;
    double rhs = 0.0;          // sqrt(I / (2m))
    double envelope = 0.0;     // sqrt(log |W| / (2m))
    bool holds = false;
};

/// Closed-path evaluation valid when the pair table is deterministic (one
/// entry), so each copy's test and train registers are in a product state and
/// the group-ERM statistics depend on the record only through per-group
/// class counts. Polynomial in m.
inline StateClassificationAnalytics state_classification_analytics(
    const StateClassificationConfig& cfg) {
    if (cfg.pairs.size() != 1)
        throw ConfigError("analytic path requires a deterministic state pair");
    if (cfg.rule != StateClassificationConfig::Rule::groupErm)
        throw ConfigError("analytic path requires the group-ERM rule");
    const auto avg = sc_detail::class_averages(cfg);
    const int k = static_cast<int>(cfg.hypotheses.size());
    const int m = cfg.m;
    const double p1 = avg.p1;

    std::vector<int> gsize(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < m; ++i) ++gsize[static_cast<std::size_t>(sc_detail::group_of(i, k))];

    // per-candidate fire probabilities on each averaged class state
    std::vector<double> q0(static_cast<std::size_t>(k)), q1(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        q0[static_cast<std::size_t>(j)] =
            (cfg.hypotheses[static_cast<std::size_t>(j)] * avg.marginal[0]).trace().real();
        q1[static_cast<std::size_t>(j)] =
            (cfg.hypotheses[static_cast<std::size_t>(j)] * avg.marginal[1]).trace().real();
    }

    long long count_space = 1;
    for (int j = 0; j < k; ++j) {
        count_space *= gsize[static_cast<std::size_t>(j)] + 1;
        if (count_space > caps::enum_pairs)
            throw ConfigError("analytic path: per-group count space exceeds the cap");
    }

    const auto binom_pmf = [](int n, double p) {
        std::vector<double> pmf(static_cast<std::size_t>(n + 1), 0.0);
        pmf[0] = 1.0;
        for (int t = 0; t < n; ++t) {
            std::vector<double> next(static_cast<std::size_t>(n + 1), 0.0);
            for (int c = 0; c <= t; ++c) {
                next[static_cast<std::size_t>(c)] += pmf[static_cast<std::size_t>(c)] * (1.0 - p);
                next[static_cast<std::size_t>(c + 1)] += pmf[static_cast<std::size_t>(c)] * p;
            }
            pmf = std::move(next);
        }
        return pmf;
    };

    // error-count pmf of group j given its class-1 count: sum of two binomials
    const auto loss_pmf = [&](int j, int n1) {
        const int g = gsize[static_cast<std::size_t>(j)];
        auto a = binom_pmf(g - n1, 1.0 - q0[static_cast<std::size_t>(j)]);  // class-0 errors
        auto b = binom_pmf(n1, q1[static_cast<std::size_t>(j)]);            // class-1 errors
        std::vector<double> pmf(static_cast<std::size_t>(g + 1), 0.0);
        for (std::size_t x = 0; x < a.size(); ++x)
            for (std::size_t y = 0; y < b.size(); ++y) pmf[x + y] += a[x] * b[y];
        return pmf;
    };

    // winner distribution given the count vector
    const auto winner_given_counts = [&](const std::vector<int>& n1) {
        std::vector<std::vector<double>> pmf(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j)
            pmf[static_cast<std::size_t>(j)] = loss_pmf(j, n1[static_cast<std::size_t>(j)]);
        std::vector<double> win(static_cast<std::size_t>(k), 0.0);
        for (int j = 0; j < k; ++j) {
            if (gsize[static_cast<std::size_t>(j)] == 0) continue;
            const int gj = gsize[static_cast<std::size_t>(j)];
            for (int c = 0; c <= gj; ++c) {
                double prob = pmf[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
                if (prob == 0.0) continue;
                for (int r = 0; r < k && prob > 0.0; ++r) {
                    if (r == j || gsize[static_cast<std::size_t>(r)] == 0) continue;
                    const int gr = gsize[static_cast<std::size_t>(r)];
                    double survive = 0.0;
                    for (int cr = 0; cr <= gr; ++cr) {
                        const long long lhs = static_cast<long long>(cr) * gj;
                        const long long rhs = static_cast<long long>(c) * gr;
                        const bool j_wins = r < j ? lhs > rhs : lhs >= rhs;
                        if (j_wins)
                            survive +=
                                pmf[static_cast<std::size_t>(r)][static_cast<std::size_t>(cr)];
                    }
                    prob *= survive;
                }
                win[static_cast<std::size_t>(j)] += prob;
            }
        }
        // all groups empty: index 0 wins
        bool all_empty = true;
        for (int j = 0; j < k; ++j)
            if (gsize[static_cast<std::size_t>(j)] > 0) all_empty = false;
        if (all_empty) win[0] = 1.0;
        return win;
    };

    // iterate the count space
    std::vector<std::vector<double>> count_pmf(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        count_pmf[static_cast<std::size_t>(j)] = binom_pmf(gsize[static_cast<std::size_t>(j)], p1);

    std::vector<double> p_w(static_cast<std::size_t>(k), 0.0);
    double mi_acc = 0.0;  // accumulate sum p(n, w) log p(w|n), then add H(W)
    std::vector<int> n1(static_cast<std::size_t>(k), 0);
    for (long long flat = 0; flat < count_space; ++flat) {
        long long rest = flat;
        double pn = 1.0;
        for (int j = 0; j < k; ++j) {
            const int gj = gsize[static_cast<std::size_t>(j)];
            n1[static_cast<std::size_t>(j)] = static_cast<int>(rest % (gj + 1));
            rest /= (gj + 1);
            pn *= count_pmf[static_cast<std::size_t>(j)]
                           [static_cast<std::size_t>(n1[static_cast<std::size_t>(j)])];
        }
        if (pn == 0.0) continue;
        auto win = winner_given_counts(n1);
        for (int j = 0; j < k; ++j) {
            const double pw = win[static_cast<std::size_t>(j)];
            if (pw > 0.0) {
                p_w[static_cast<std::size_t>(j)] += pn * pw;
                mi_acc += pn * pw * std::log(pw);
            }
        }
    }
    double h_w = 0.0;
    for (int j = 0; j < k; ++j) {
        const double pw = p_w[static_cast<std::size_t>(j)];
        if (pw > 0.0) h_w -= pw * std::log(pw);
    }
    StateClassificationAnalytics out;
    out.mi = clamp_information(mi_acc + h_w, "I(S;W)");

    // per-class expected loss of each discriminator on a fresh copy
    const auto bar_loss = [&](int z, int j) {
        return z == 0 ? 1.0 - q0[static_cast<std::size_t>(j)] : q1[static_cast<std::size_t>(j)];
    };

    // empirical risk: average over copies of E[loss(Z_i, W)] under the joint
    // law of (Z_i, W); by exchangeability only the copy's group matters, so
    // iterate groups weighted by their size.
    double emp = 0.0;
    for (int gi = 0; gi < k; ++gi) {
        const int gsz = gsize[static_cast<std::size_t>(gi)];
        if (gsz == 0) continue;
        const double weight = static_cast<double>(gsz) / m;
        for (int z = 0; z < 2; ++z) {
            const double pz = z == 1 ? p1 : 1.0 - p1;
            if (pz == 0.0) continue;
            // count distribution with one group-gi copy pinned to class z
            std::vector<std::vector<double>> pinned = count_pmf;
            auto reduced = binom_pmf(gsz - 1, p1);
            std::vector<double> shifted(static_cast<std::size_t>(gsz + 1), 0.0);
            for (int c = 0; c <= gsz - 1; ++c)
                shifted[static_cast<std::size_t>(c + z)] += reduced[static_cast<std::size_t>(c)];
            pinned[static_cast<std::size_t>(gi)] = shifted;

            std::vector<int> nv(static_cast<std::size_t>(k), 0);
            for (long long flat = 0; flat < count_space; ++flat) {
                long long rest = flat;
                double pn = 1.0;
                for (int j = 0; j < k; ++j) {
                    const int gj = gsize[static_cast<std::size_t>(j)];
                    nv[static_cast<std::size_t>(j)] = static_cast<int>(rest % (gj + 1));
                    rest /= (gj + 1);
                    pn *= pinned[static_cast<std::size_t>(j)]
                                [static_cast<std::size_t>(nv[static_cast<std::size_t>(j)])];
                }
                if (pn == 0.0) continue;
                auto win = winner_given_counts(nv);
                for (int j = 0; j < k; ++j)
                    emp += weight * pz * pn * win[static_cast<std::size_t>(j)] * bar_loss(z, j);
            }
        }
    }
    out.empirical = emp;

    double tru = 0.0;
    for (int z = 0; z < 2; ++z) {
        const double pz = z == 1 ? p1 : 1.0 - p1;
        for (int j = 0; j < k; ++j) tru += pz * p_w[static_cast<std::size_t>(j)] * bar_loss(z, j);
    }
    out.true_risk = tru;
    out.gen = tru - emp;
    out.rhs = std::sqrt(out.mi / (2.0 * m));
    out.envelope = std::sqrt(std::log(static_cast<double>(k)) / (2.0 * m));
    out.holds = std::abs(out.gen) <= out.rhs + tol::cert_slack;
    return out;
}

}  // namespace qgen
