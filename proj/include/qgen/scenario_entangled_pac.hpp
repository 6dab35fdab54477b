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

/// Learning a boolean function from entangled data: the data is m copies of
/// the purification sum_z sqrt(P(z)) |z>_test |z>_train with z = (x, y), and
/// the learner is a measure-and-prepare channel realizing a classical rule
/// P(w | s) on the training half. Hypotheses are functions X -> Y.
struct EntangledPacConfig {
    int n_x = 2;  // |X|; Y is binary
    int m = 1;
    std::vector<double> p_z;                  // distribution over Z = X x Y, size 2 n_x
    std::vector<std::vector<int>> hypotheses; // each entry: y value per x
    enum class Rule { erm, gibbs, table } rule = Rule::erm;
    double gibbs_gamma = 4.0;
    /// Explicit conditional table P(w | s), rows indexed by the s record
    /// (base-|Z| big-endian digits), used when rule == table.
    std::vector<std::vector<double>> w_given_s;
};

namespace ep_detail {

inline int n_z(const EntangledPacConfig& cfg) { return 2 * cfg.n_x; }

inline long long n_records(const EntangledPacConfig& cfg) {
    long long n = 1;
    for (int i = 0; i < cfg.m; ++i) n *= n_z(cfg);
    return n;
}

inline std::vector<int> record_digits(const EntangledPacConfig& cfg, long long rec) {
    std::vector<int> z(static_cast<std::size_t>(cfg.m));
    for (int i = cfg.m - 1; i >= 0; --i) {
        z[static_cast<std::size_t>(i)] = static_cast<int>(rec % n_z(cfg));
        rec /= n_z(cfg);
    }
    return z;
}

/// 0/1 loss of hypothesis w on the example z = (x, y).
inline double zero_one_loss(const EntangledPacConfig& cfg, int w, int z) {
    const int x = z / 2;
    const int y = z % 2;
    return cfg.hypotheses[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] == y ? 0.0
                                                                                         : 1.0;
}

/// The classical learner rule as a stochastic table P(w | s).
inline std::vector<std::vector<double>> conditional_table(const EntangledPacConfig& cfg) {
    const long long n_s = n_records(cfg);
    const int n_w = static_cast<int>(cfg.hypotheses.size());
    if (cfg.rule == EntangledPacConfig::Rule::table) {
        if (static_cast<long long>(cfg.w_given_s.size()) != n_s)
            throw ConfigError("entangledPac: conditional table must have |Z|^m rows");
        return cfg.w_given_s;
    }
    std::vector<std::vector<double>> table(static_cast<std::size_t>(n_s));
    for (long long rec = 0; rec < n_s; ++rec) {
        const auto z = record_digits(cfg, rec);
        std::vector<double> emp(static_cast<std::size_t>(n_w), 0.0);
        for (int w = 0; w < n_w; ++w)
            for (int i = 0; i < cfg.m; ++i)
                emp[static_cast<std::size_t>(w)] +=
                    zero_one_loss(cfg, w, z[static_cast<std::size_t>(i)]) / cfg.m;
        std::vector<double> row(static_cast<std::size_t>(n_w), 0.0);
        if (cfg.rule == EntangledPacConfig::Rule::erm) {
            int best = 0;
            for (int w = 1; w < n_w; ++w)
                if (emp[static_cast<std::size_t>(w)] < emp[static_cast<std::size_t>(best)] - 1e-15)
                    best = w;
            row[static_cast<std::size_t>(best)] = 1.0;
        } else {
            double mass = 0.0;
            for (int w = 0; w < n_w; ++w) {
                row[static_cast<std::size_t>(w)] =
                    std::exp(-cfg.gibbs_gamma * emp[static_cast<std::size_t>(w)]);
                mass += row[static_cast<std::size_t>(w)];
            }
            for (auto& p : row) p /= mass;
        }
        table[static_cast<std::size_t>(rec)] = std::move(row);
    }
    return table;
}

}  // namespace ep_detail

/// Classical shadow of the scenario: record distribution and conditional
/// hypothesis table, for the diagonal-case comparisons.
struct EntangledPacClassical {
    std::vector<double> p_s;                   // P^m over records
    std::vector<std::vector<double>> w_given_s;
    std::vector<std::vector<double>> loss_table;  // ell-bar(rec, w): averaged loss
};

inline EntangledPacClassical entangled_pac_classical(const EntangledPacConfig& cfg) {
    const long long n_s = ep_detail::n_records(cfg);
    const int n_w = static_cast<int>(cfg.hypotheses.size());
    EntangledPacClassical out;
    out.w_given_s = ep_detail::conditional_table(cfg);
    out.p_s.resize(static_cast<std::size_t>(n_s));
    out.loss_table.assign(static_cast<std::size_t>(n_s),
                          std::vector<double>(static_cast<std::size_t>(n_w), 0.0));
    for (long long rec = 0; rec < n_s; ++rec) {
        const auto z = ep_detail::record_digits(cfg, rec);
        double p = 1.0;
        for (int i = 0; i < cfg.m; ++i) p *= cfg.p_z[static_cast<std::size_t>(z[static_cast<std::size_t>(i)])];
        out.p_s[static_cast<std::size_t>(rec)] = p;
        for (int w = 0; w < n_w; ++w) {
            double acc = 0.0;
            for (int i = 0; i < cfg.m; ++i)
                acc += ep_detail::zero_one_loss(cfg, w, z[static_cast<std::size_t>(i)]) / cfg.m;
            out.loss_table[static_cast<std::size_t>(rec)][static_cast<std::size_t>(w)] = acc;
        }
    }
    return out;
}

inline BuiltScenario build_entangled_pac(const EntangledPacConfig& cfg) {
    if (cfg.n_x < 1) throw ConfigError("entangledPac: n_x must be positive");
    if (cfg.m < 1) throw ConfigError("entangledPac: m must be positive");
    if (cfg.hypotheses.empty()) throw ConfigError("entangledPac: no hypotheses");
    for (const auto& h : cfg.hypotheses)
        if (static_cast<int>(h.size()) != cfg.n_x)
            throw ConfigError("entangledPac: hypothesis table width must equal |X|");
    const int nz = ep_detail::n_z(cfg);
    if (static_cast<int>(cfg.p_z.size()) != nz)
        throw ConfigError("entangledPac: p_z must have 2 |X| entries");
    double mass = 0.0;
    for (double p : cfg.p_z) {
        if (p < 0.0) throw ConfigError("entangledPac: negative probability");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9) throw ConfigError("entangledPac: p_z must sum to 1");

    const long long n_s = ep_detail::n_records(cfg);
    const int n_w = static_cast<int>(cfg.hypotheses.size());
    double dim_total = 1.0;
    for (int i = 0; i < 2 * cfg.m; ++i) dim_total *= nz;
    dim_total *= n_w;
    if (dim_total > 65536.0)
        throw ConfigError("entangledPac: total dimension too large; reduce m or |X|");

    // test register: one label per copy; train register: one label per copy
    std::vector<std::string> test_labels, train_labels, labels;
    std::vector<int> dims;
    for (int i = 0; i < cfg.m; ++i) {
        test_labels.push_back("test" + std::to_string(i));
        labels.push_back(test_labels.back());
        dims.push_back(nz);
    }
    for (int i = 0; i < cfg.m; ++i) {
        train_labels.push_back("train" + std::to_string(i));
        labels.push_back(train_labels.back());
        dims.push_back(nz);
    }
    SubsystemShape data_shape(labels, dims);

    // |Phi> = sum_s sqrt(P^m(s)) |s>_test |s>_train
    auto classical = entangled_pac_classical(cfg);
    const long long side = n_s;
    Vector phi = Vector::Zero(side * side);
    for (long long rec = 0; rec < n_s; ++rec)
        phi[rec * side + rec] = std::sqrt(classical.p_s[static_cast<std::size_t>(rec)]);
    std::vector<CqEntry> entries;
    entries.push_back({"*", {}, 1.0, DensityOperator(phi * phi.adjoint(), data_shape)});
    CQEnsemble ens(std::move(entries), test_labels, train_labels);

    // Measure-and-prepare channel sum_{s,w} P(w|s) |w><s| as Kraus pieces.
    SubsystemShape train_shape;
    {
        std::vector<int> td(static_cast<std::size_t>(cfg.m), nz);
        train_shape = SubsystemShape(train_labels, td);
    }
    SubsystemShape hyp_shape({"hyp"}, {n_w});
    std::vector<Matrix> kraus;
    for (long long rec = 0; rec < n_s; ++rec)
        for (int w = 0; w < n_w; ++w) {
            const double p = classical.w_given_s[static_cast<std::size_t>(rec)]
                                                 [static_cast<std::size_t>(w)];
            if (p <= 0.0) continue;
            Matrix k = Matrix::Zero(n_w, side);
            k(w, rec) = std::sqrt(p);
            kraus.push_back(std::move(k));
        }
    auto channel = std::make_shared<Channel>(std::move(kraus), train_shape, hyp_shape);

    Learner lr;
    lr.povm_for = {Povm::trivial(train_shape)};
    lr.hyp_shape = hyp_shape;
    lr.channel_for = [channel](int, int) { return *channel; };

    // L = (1/m) sum_i sum_{z, w} ell(w, z) |z><z|_test_i (x) |w><w|_hyp
    SubsystemShape th_shape;
    {
        std::vector<std::string> tl = test_labels;
        tl.push_back("hyp");
        std::vector<int> td(static_cast<std::size_t>(cfg.m), nz);
        td.push_back(n_w);
        th_shape = SubsystemShape(tl, td);
    }
    const int m = cfg.m;
    auto cfg_copy = std::make_shared<EntangledPacConfig>(cfg);
    LossFamily loss;
    loss.observable = [cfg_copy, th_shape, test_labels, nz, n_w, m](int, int) {
        Matrix l = Matrix::Zero(th_shape.total_dim(), th_shape.total_dim());
        for (int i = 0; i < m; ++i) {
            Matrix local = Matrix::Zero(nz * n_w, nz * n_w);
            for (int z = 0; z < nz; ++z)
                for (int w = 0; w < n_w; ++w)
                    local(z * n_w + w, z * n_w + w) =
                        ep_detail::zero_one_loss(*cfg_copy, w, z);
            l += embed_matrix(local, {test_labels[static_cast<std::size_t>(i)], "hyp"},
                              th_shape) /
                 static_cast<double>(m);
        }
        return HermitianObservable(l, th_shape);
    };
    LossFamily::LocalStructure ls;
    ls.sites = cfg.m;
    ls.max_local_norm = 1.0;
    auto hyp_copy = cfg_copy;
    ls.local_observable = [hyp_copy, nz, n_w](int site, int, int) {
        Matrix local = Matrix::Zero(nz * n_w, nz * n_w);
        for (int z = 0; z < nz; ++z)
            for (int w = 0; w < n_w; ++w)
                local(z * n_w + w, z * n_w + w) = ep_detail::zero_one_loss(*hyp_copy, w, z);
        SubsystemShape s({"test" + std::to_string(site), "hyp"}, {nz, n_w});
        return HermitianObservable(local, s);
    };
    loss.local = ls;

    BuiltScenario built{std::move(ens), std::move(lr), std::move(loss), {},
                        BoundKind::cor22, {}};
    built.inputs.alpha = 0.5 / std::sqrt(static_cast<double>(cfg.m));
    built.inputs.beta = 0.0;  // a single classical record: the CMGF side is constant
    built.metadata["n_hypotheses"] = static_cast<double>(n_w);
    return built;
}

}  // namespace qgen
