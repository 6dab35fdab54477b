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

#include "qgen/rng.hpp"
#include "qgen/scenario_types.hpp"

namespace qgen {

/// Predicting expectation values of an unknown state: the learner sees 2m
/// classical effect descriptions, builds an epsilon-covering of the
/// hypothesis states under the empirical seminorm of the first half, runs
/// per-effect repeated measurements on training copies for the second half,
/// and returns the empirical risk minimizer over the net.
struct PacStateLearningConfig {
    int d = 2;
    int m = 2;        // sample pairs; the classical record holds 2m symbols
    int m_train = 2;  // measurement shots per training effect
    int m_test = 2;   // measurement shots per test effect
    double epsilon_tilde = 0.1;
    std::vector<std::pair<double, Matrix>> effects;  // P over Z: (prob, E(z))
    std::vector<Matrix> hypothesis_states;           // candidate states rho0(w)
    Matrix rho0;                                     // the unknown state
    long long max_exact_branches = 400000;           // exact-path budget
};

struct PacAnalytics {
    double empirical = 0.0;
    double true_risk = 0.0;
    double gen = 0.0;
    double mi = 0.0;              // I(S; W) over the full record, nats
    double mi_conditional = 0.0;  // E_head[I(tail; W | head)], nats
    double rhs = 0.0;             // E_head[sqrt(I_slice / (2m))]
    bool holds = false;
    double prediction_error = 0.0;  // E[pred(W)]
    double optimal_prediction = 0.0;
    double excess = 0.0;
    double excess_stderr = 0.0;  // 0 for the exact path
    double mean_log_net = 0.0;
    double max_net = 0.0;
    double net_inf_deviation = 0.0;  // E[min over the net of the true deviation]
    bool exact = true;
    int n_samples = 0;
};

namespace pac_detail {

struct Tables {
    int n_z = 0;
    int n_w = 0;
    std::vector<double> p_z;
    Eigen::MatrixXd e;            // e(z, w) = tr[E(z) rho0(w)]
    Eigen::VectorXd e0;           // tr[E(z) rho0]
    Eigen::MatrixXd deviation;    // |e(z, w) - e0(z)|
};

inline Tables make_tables(const PacStateLearningConfig& cfg) {
    Tables t;
    t.n_z = static_cast<int>(cfg.effects.size());
    t.n_w = static_cast<int>(cfg.hypothesis_states.size());
    if (t.n_z < 1) throw ConfigError("pacStateLearning: empty effect table");
    if (t.n_w < 1) throw ConfigError("pacStateLearning: empty hypothesis set");
    double mass = 0.0;
    t.p_z.resize(static_cast<std::size_t>(t.n_z));
    t.e.resize(t.n_z, t.n_w);
    t.e0.resize(t.n_z);
    t.deviation.resize(t.n_z, t.n_w);
    for (int z = 0; z < t.n_z; ++z) {
        const auto& [p, eff] = cfg.effects[static_cast<std::size_t>(z)];
        if (p < 0.0) throw ConfigError("pacStateLearning: negative probability");
        mass += p;
        t.p_z[static_cast<std::size_t>(z)] = p;
        t.e0[z] = (eff * cfg.rho0).trace().real();
        for (int w = 0; w < t.n_w; ++w)
            t.e(z, w) =
                (eff * cfg.hypothesis_states[static_cast<std::size_t>(w)]).trace().real();
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw ConfigError("pacStateLearning: effect probabilities must sum to 1");
    for (int z = 0; z < t.n_z; ++z)
        for (int w = 0; w < t.n_w; ++w) t.deviation(z, w) = std::abs(t.e(z, w) - t.e0[z]);
    return t;
}

/// Empirical seminorm distance between hypotheses over the head symbols.
inline double empirical_distance(const Tables& t, const std::vector<int>& head, int w1, int w2) {
    double acc = 0.0;
    for (int zi : head) {
        const double diff = t.e(zi, w1) - t.e(zi, w2);
        acc += diff * diff;
    }
    return std::sqrt(acc / static_cast<double>(head.size()));
}

/// Greedy farthest-point covering net over the empirical seminorm; insertion
/// stops once the covering radius reaches epsilon. Deterministic: seeds with
/// hypothesis 0, ties break to the lowest index.
inline std::vector<int> build_net(const Tables& t, const std::vector<int>& head,
                                  double epsilon) {
    std::vector<int> net = {0};
    std::vector<double> dist(static_cast<std::size_t>(t.n_w));
    for (int w = 0; w < t.n_w; ++w) dist[static_cast<std::size_t>(w)] =
        empirical_distance(t, head, w, 0);
    for (;;) {
        int far = 0;
        for (int w = 1; w < t.n_w; ++w)
            if (dist[static_cast<std::size_t>(w)] > dist[static_cast<std::size_t>(far)] + 1e-15)
                far = w;
        if (dist[static_cast<std::size_t>(far)] <= epsilon) break;
        net.push_back(far);
        for (int w = 0; w < t.n_w; ++w)
            dist[static_cast<std::size_t>(w)] = std::min(
                dist[static_cast<std::size_t>(w)], empirical_distance(t, head, w, far));
    }
    return net;
}

/// ERM over the net given the averaged training outcomes; ties break to the
/// lowest net index.
inline int erm_choice(const Tables& t, const std::vector<int>& net, const std::vector<int>& tail,
                      const std::vector<double>& b_mean) {
    int best = net[0];
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < net.size(); ++k) {
        double val = 0.0;
        for (std::size_t i = 0; i < tail.size(); ++i)
            val += std::abs(t.e(tail[i], net[k]) - b_mean[i]);
        if (val < best_val - 1e-15) {
            best_val = val;
            best = net[static_cast<std::size_t>(k)];
        }
    }
    return best;
}

inline double binomial_pmf_entry(int n, int k, double p) {
    double logc = 0.0;
    for (int i = 0; i < k; ++i)
        logc += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
    const double q = 1.0 - p;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (q <= 0.0) return k == n ? 1.0 : 0.0;
    return std::exp(logc + k * std::log(p) + (n - k) * std::log(q));
}

/// E | a - Binom(n, p)/n | computed exactly.
inline double expected_abs_deviation(double a, int n, double p) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k)
        acc += binomial_pmf_entry(n, k, p) * std::abs(a - static_cast<double>(k) / n);
    return acc;
}

/// Expected test-side loss of hypothesis w on symbol z: the measured shot
/// average replaces the exact expectation value.
inline double test_loss(const Tables& t, const PacStateLearningConfig& cfg, int z, int w) {
    return expected_abs_deviation(t.e(z, w), cfg.m_test, t.e0[z]);
}

inline double prediction_error(const Tables& t, int w) {
    double acc = 0.0;
    for (int z = 0; z < t.n_z; ++z) acc += t.p_z[static_cast<std::size_t>(z)] * t.deviation(z, w);
    return acc;
}

inline double optimal_prediction_error(const Tables& t) {
    double best = std::numeric_limits<double>::infinity();
    for (int w = 0; w < t.n_w; ++w) best = std::min(best, prediction_error(t, w));
    return best;
}

}  // namespace pac_detail

/// Exact enumeration of the full scenario: heads, tails, and all training
/// outcome branches (binomial sufficiency reduces shot patterns to counts).
inline PacAnalytics pac_exact_analytics(const PacStateLearningConfig& cfg) {
    using namespace pac_detail;
    const Tables t = make_tables(cfg);
    const int m = cfg.m;

    long long n_tuples = 1;
    for (int i = 0; i < m; ++i) n_tuples *= t.n_z;
    long long branches = 1;
    for (int i = 0; i < m; ++i) branches *= cfg.m_train + 1;
    if (n_tuples * n_tuples * branches > cfg.max_exact_branches)
        throw EnumerationCap("pacStateLearning: exact enumeration of " +
                             std::to_string(n_tuples * n_tuples * branches) +
                             " branches exceeds the budget; use the Monte Carlo path");

    const auto digits = [&](long long rec) {
        std::vector<int> z(static_cast<std::size_t>(m));
        for (int i = m - 1; i >= 0; --i) {
            z[static_cast<std::size_t>(i)] = static_cast<int>(rec % t.n_z);
            rec /= t.n_z;
        }
        return z;
    };
    const auto tuple_prob = [&](const std::vector<int>& z) {
        double p = 1.0;
        for (int zi : z) p *= t.p_z[static_cast<std::size_t>(zi)];
        return p;
    };

    PacAnalytics out;
    Eigen::VectorXd p_w_total = Eigen::VectorXd::Zero(t.n_w);
    double mean_log_net = 0.0;
    double max_net = 0.0;
    double mi_conditional = 0.0;
    double rhs = 0.0;
    double empirical = 0.0;
    double net_inf_dev = 0.0;
    // joint over (head, tail, w) for the unconditional mutual information
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(n_tuples * n_tuples, t.n_w);

    for (long long h = 0; h < n_tuples; ++h) {
        const auto head = digits(h);
        const double p_head = tuple_prob(head);
        if (p_head <= 0.0) continue;
        const auto net = build_net(t, head, cfg.epsilon_tilde);
        mean_log_net += p_head * std::log(static_cast<double>(net.size()));
        max_net = std::max(max_net, static_cast<double>(net.size()));

        Eigen::MatrixXd slice = Eigen::MatrixXd::Zero(n_tuples, t.n_w);  // P(tail, w | head)
        for (long long tl = 0; tl < n_tuples; ++tl) {
            const auto tail = digits(tl);
            const double p_tail = tuple_prob(tail);
            if (p_tail <= 0.0) continue;
            // net-quality diagnostic: best true deviation within the net
            double best_dev = std::numeric_limits<double>::infinity();
            for (int w : net) {
                double dev = 0.0;
                for (int zi : tail) dev += t.deviation(zi, w) / m;
                best_dev = std::min(best_dev, dev);
            }
            net_inf_dev += p_head * p_tail * best_dev;

            // enumerate training outcome count vectors
            std::vector<int> counts(static_cast<std::size_t>(m), 0);
            for (long long br = 0; br < branches; ++br) {
                long long rest = br;
                double pb = 1.0;
                std::vector<double> b_mean(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) {
                    counts[static_cast<std::size_t>(i)] =
                        static_cast<int>(rest % (cfg.m_train + 1));
                    rest /= (cfg.m_train + 1);
                    pb *= binomial_pmf_entry(cfg.m_train, counts[static_cast<std::size_t>(i)],
                                             t.e0[tail[static_cast<std::size_t>(i)]]);
                    b_mean[static_cast<std::size_t>(i)] =
                        static_cast<double>(counts[static_cast<std::size_t>(i)]) / cfg.m_train;
                }
                if (pb <= 0.0) continue;
                const int w = erm_choice(t, net, tail, b_mean);
                slice(tl, w) += p_tail * pb;
            }
        }
        // per-head conditional mutual information and its inverted bound
        JointDistribution cond(slice, 1e-7);
        const double i_slice = classical_mi(cond);
        mi_conditional += p_head * i_slice;
        rhs += p_head * std::sqrt(i_slice / (2.0 * m));

        for (long long tl = 0; tl < n_tuples; ++tl) {
            const auto tail = digits(tl);
            for (int w = 0; w < t.n_w; ++w) {
                const double pw = slice(tl, w);
                if (pw <= 0.0) continue;
                joint(h * n_tuples + tl, w) += p_head * pw;
                p_w_total[w] += p_head * pw;
                double loss = 0.0;
                for (int zi : tail) loss += test_loss(t, cfg, zi, w) / m;
                empirical += p_head * pw * loss;
            }
        }
    }

    out.empirical = empirical;
    double true_risk = 0.0;
    for (int w = 0; w < t.n_w; ++w) {
        if (p_w_total[w] <= 0.0) continue;
        double loss = 0.0;
        for (int z = 0; z < t.n_z; ++z)
            loss += t.p_z[static_cast<std::size_t>(z)] * test_loss(t, cfg, z, w);
        true_risk += p_w_total[w] * loss;
    }
    out.true_risk = true_risk;
    out.gen = true_risk - empirical;
    out.mi = classical_mi(JointDistribution(joint, 1e-7));
    out.mi_conditional = mi_conditional;
    out.rhs = rhs;
    out.holds = std::abs(out.gen) <= rhs + tol::cert_slack;
    out.mean_log_net = mean_log_net;
    out.max_net = max_net;
    out.net_inf_deviation = net_inf_dev;

    double pred = 0.0;
    for (int w = 0; w < t.n_w; ++w) pred += p_w_total[w] * prediction_error(t, w);
    out.prediction_error = pred;
    out.optimal_prediction = optimal_prediction_error(t);
    out.excess = pred - out.optimal_prediction;
    out.exact = true;
    return out;
}

/// Seeded Monte Carlo estimate over data draws and measurement shots; the
/// per-sample test-side expectations stay exact, so the only randomness is
/// the head/tail draw and the training counts.
inline PacAnalytics pac_mc_analytics(const PacStateLearningConfig& cfg, std::uint64_t seed,
                                     int n_samples) {
    using namespace pac_detail;
    const Tables t = make_tables(cfg);
    const int m = cfg.m;
    Rng rng(derive_seed(seed, 0xACC0));

    const auto draw_symbol = [&](Rng& r) {
        double u = r.uniform();
        for (int z = 0; z < t.n_z; ++z) {
            u -= t.p_z[static_cast<std::size_t>(z)];
            if (u <= 0.0) return z;
        }
        return t.n_z - 1;
    };

    PacAnalytics out;
    out.exact = false;
    out.n_samples = n_samples;
    double emp_acc = 0.0, tru_acc = 0.0, pred_acc = 0.0;
    double excess_sq = 0.0;
    double log_net_acc = 0.0;
    double net_dev_acc = 0.0;
    const double opt = optimal_prediction_error(t);

    for (int it = 0; it < n_samples; ++it) {
        std::vector<int> head(static_cast<std::size_t>(m)), tail(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) head[static_cast<std::size_t>(i)] = draw_symbol(rng);
        for (int i = 0; i < m; ++i) tail[static_cast<std::size_t>(i)] = draw_symbol(rng);
        const auto net = build_net(t, head, cfg.epsilon_tilde);
        log_net_acc += std::log(static_cast<double>(net.size()));
        out.max_net = std::max(out.max_net, static_cast<double>(net.size()));

        std::vector<double> b_mean(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double p = t.e0[tail[static_cast<std::size_t>(i)]];
            int count = 0;
            for (int l = 0; l < cfg.m_train; ++l)
                if (rng.uniform() < p) ++count;
            b_mean[static_cast<std::size_t>(i)] = static_cast<double>(count) / cfg.m_train;
        }
        const int w = erm_choice(t, net, tail, b_mean);

        double loss = 0.0, dev_best = std::numeric_limits<double>::infinity();
        for (int zi : tail) loss += test_loss(t, cfg, zi, w) / m;
        for (int cand : net) {
            double dev = 0.0;
            for (int zi : tail) dev += t.deviation(zi, cand) / m;
            dev_best = std::min(dev_best, dev);
        }
        net_dev_acc += dev_best;
        emp_acc += loss;
        double tru = 0.0;
        for (int z = 0; z < t.n_z; ++z)
            tru += t.p_z[static_cast<std::size_t>(z)] * test_loss(t, cfg, z, w);
        tru_acc += tru;
        const double pred = prediction_error(t, w);
        pred_acc += pred;
        excess_sq += (pred - opt) * (pred - opt);
    }

    const double n = static_cast<double>(n_samples);
    out.empirical = emp_acc / n;
    out.true_risk = tru_acc / n;
    out.gen = out.true_risk - out.empirical;
    out.prediction_error = pred_acc / n;
    out.optimal_prediction = opt;
    out.excess = out.prediction_error - opt;
    const double var = excess_sq / n - out.excess * out.excess;
    out.excess_stderr = std::sqrt(std::max(0.0, var) / n);
    out.mean_log_net = log_net_acc / n;
    out.net_inf_deviation = net_dev_acc / n;
    return out;
}

/// Dense pipeline realization for small instances: classical records hold
/// all 2m symbols, the quantum register carries the m_test- and m_train-shot
/// state copies, and the learner POVM enumerates every training shot pattern.
inline BuiltScenario build_pac_state_learning(const PacStateLearningConfig& cfg) {
    using namespace pac_detail;
    const Tables t = make_tables(cfg);
    const int m = cfg.m;
    const int n_z = t.n_z;
    const int n_w = t.n_w;

    long long n_records = 1;
    for (int i = 0; i < 2 * m; ++i) {
        n_records *= n_z;
        if (n_records * n_w > caps::enum_pairs)
            throw EnumerationCap("pacStateLearning: record grid exceeds the enumeration cap");
    }
    const long long train_patterns = 1LL << (m * cfg.m_train);
    const long long test_patterns = 1LL << (m * cfg.m_test);
    double dim_total = std::pow(static_cast<double>(cfg.d), m * (cfg.m_test + cfg.m_train));
    if (train_patterns > 4096 || test_patterns > 4096 || dim_total > 4096.0)
        throw ConfigError("pacStateLearning: dense path too large; use the analytic paths");

    long long test_dim = 1, train_dim = 1;
    for (int i = 0; i < m * cfg.m_test; ++i) test_dim *= cfg.d;
    for (int i = 0; i < m * cfg.m_train; ++i) train_dim *= cfg.d;
    SubsystemShape data_shape({"test", "train"},
                              {static_cast<int>(test_dim), static_cast<int>(train_dim)});
    SubsystemShape train_shape({"train"}, {static_cast<int>(train_dim)});
    SubsystemShape test_shape({"test"}, {static_cast<int>(test_dim)});

    Matrix rho_copies = Matrix::Identity(1, 1);
    for (int i = 0; i < m * (cfg.m_test + cfg.m_train); ++i) rho_copies = kron(rho_copies, cfg.rho0);

    const auto digits2m = [&](long long rec) {
        std::vector<int> z(static_cast<std::size_t>(2 * m));
        for (int i = 2 * m - 1; i >= 0; --i) {
            z[static_cast<std::size_t>(i)] = static_cast<int>(rec % n_z);
            rec /= n_z;
        }
        return z;
    };

    std::vector<CqEntry> entries;
    for (long long rec = 0; rec < n_records; ++rec) {
        auto z = digits2m(rec);
        double prob = 1.0;
        std::string label;
        for (int i = 0; i < 2 * m; ++i) {
            prob *= t.p_z[static_cast<std::size_t>(z[static_cast<std::size_t>(i)])];
            if (i) label += ",";
            label += std::to_string(z[static_cast<std::size_t>(i)]);
        }
        entries.push_back({label, z, prob, DensityOperator(rho_copies, data_shape)});
    }
    CQEnsemble ens(std::move(entries), {"test"}, {"train"});

    auto cfg_copy = std::make_shared<PacStateLearningConfig>(cfg);
    auto tables = std::make_shared<Tables>(t);

    // POVM: all m_train-shot two-outcome patterns per training block, mapped
    // through the deterministic net-ERM rule.
    Learner lr;
    lr.hyp_shape = SubsystemShape({"hyp"}, {1});
    for (long long rec = 0; rec < n_records; ++rec) {
        auto z = digits2m(rec);
        std::vector<int> head(z.begin(), z.begin() + m);
        std::vector<int> tail(z.begin() + m, z.end());
        const auto net = build_net(t, head, cfg.epsilon_tilde);

        std::vector<Matrix> effect_mats(static_cast<std::size_t>(n_w));
        for (auto& e : effect_mats) e = Matrix::Zero(train_dim, train_dim);
        for (long long pattern = 0; pattern < train_patterns; ++pattern) {
            Matrix piece = Matrix::Identity(1, 1);
            std::vector<double> b_mean(static_cast<std::size_t>(m), 0.0);
            for (int i = 0; i < m; ++i) {
                const Matrix& eff = cfg.effects[static_cast<std::size_t>(
                                                    tail[static_cast<std::size_t>(i)])].second;
                int count = 0;
                for (int l = 0; l < cfg.m_train; ++l) {
                    const int bit =
                        static_cast<int>((pattern >> (i * cfg.m_train + l)) & 1);
                    count += bit;
                    piece = kron(piece, bit ? eff : (identity_matrix(cfg.d) - eff).eval());
                }
                b_mean[static_cast<std::size_t>(i)] =
                    static_cast<double>(count) / cfg.m_train;
            }
            const int w = erm_choice(t, net, tail, b_mean);
            effect_mats[static_cast<std::size_t>(w)] += piece;
        }
        std::vector<EffectOperator> effects;
        for (auto& e : effect_mats) effects.emplace_back(e, train_shape);
        lr.povm_for.emplace_back(std::move(effects));
    }
    lr.channel_for = [train_shape](int, int) { return Channel::trace_out(train_shape, "hyp"); };

    // Loss: test-shot patterns weighted by the shot-averaged deviation.
    SubsystemShape th_shape({"test", "hyp"}, {static_cast<int>(test_dim), 1});
    const long long n_records_c = n_records;
    LossFamily loss;
    loss.observable = [cfg_copy, tables, th_shape, test_patterns, m, n_records_c](int s, int w) {
        const int n_z_l = tables->n_z;
        std::vector<int> z(static_cast<std::size_t>(2 * m));
        long long rec = s;
        for (int i = 2 * m - 1; i >= 0; --i) {
            z[static_cast<std::size_t>(i)] = static_cast<int>(rec % n_z_l);
            rec /= n_z_l;
        }
        std::vector<int> tail(z.begin() + m, z.end());
        Matrix l = Matrix::Zero(th_shape.total_dim(), th_shape.total_dim());
        for (long long pattern = 0; pattern < test_patterns; ++pattern) {
            Matrix piece = Matrix::Identity(1, 1);
            double weight = 0.0;
            for (int i = 0; i < m; ++i) {
                const Matrix& eff =
                    cfg_copy->effects[static_cast<std::size_t>(
                                          tail[static_cast<std::size_t>(i)])].second;
                int count = 0;
                for (int lsh = 0; lsh < cfg_copy->m_test; ++lsh) {
                    const int bit =
                        static_cast<int>((pattern >> (i * cfg_copy->m_test + lsh)) & 1);
                    count += bit;
                    piece = kron(piece,
                                 bit ? eff : (identity_matrix(cfg_copy->d) - eff).eval());
                }
                weight += std::abs(tables->e(tail[static_cast<std::size_t>(i)], w) -
                                   static_cast<double>(count) / cfg_copy->m_test) /
                          m;
            }
            l += weight * piece;
        }
        return HermitianObservable(l, th_shape);
    };
    LossFamily::LocalStructure ls;
    ls.sites = m;
    ls.max_local_norm = 1.0;
    loss.local = ls;

    BuiltScenario built{std::move(ens), std::move(lr), std::move(loss), {},
                        BoundKind::cor24, {}};
    built.inputs.local_alphas.assign(static_cast<std::size_t>(m), 0.5);
    built.inputs.local_betas.assign(static_cast<std::size_t>(m), 0.5);
    built.inputs.alpha = 0.5 / std::sqrt(static_cast<double>(m));
    built.inputs.beta = 0.5 / std::sqrt(static_cast<double>(m));
    built.metadata["n_hypotheses"] = static_cast<double>(n_w);
    return built;
}

/// Exhaustive verification of the covering property: every hypothesis sits
/// within epsilon of some net member under the head's empirical seminorm.
inline bool verify_net_coverage(const PacStateLearningConfig& cfg, const std::vector<int>& head) {
    using namespace pac_detail;
    const Tables t = make_tables(cfg);
    const auto net = build_net(t, head, cfg.epsilon_tilde);
    for (int w = 0; w < t.n_w; ++w) {
        double best = std::numeric_limits<double>::infinity();
        for (int c : net) best = std::min(best, empirical_distance(t, head, w, c));
        if (best > cfg.epsilon_tilde + 1e-12) return false;
    }
    return true;
}

}  // namespace qgen
