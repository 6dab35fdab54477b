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
#include <utility>
#include <vector>

#include "qgen/distribution.hpp"
#include "qgen/qmat.hpp"

namespace qgen {

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

/// A finite POVM whose outcomes are aligned with a hypothesis table: effect k
/// belongs to hypothesis index k.
class Povm {
public:
    explicit Povm(std::vector<EffectOperator> effects) : effects_(std::move(effects)) {
        if (effects_.empty()) throw InvalidOperator("Povm: no effects");
        Matrix sum = Matrix::Zero(effects_.front().dim(), effects_.front().dim());
        for (const auto& e : effects_) {
            if (e.shape() != effects_.front().shape())
                throw ShapeMismatch("Povm: effects live on different shapes");
            sum += e.matrix();
        }
        const double defect = (sum - identity_matrix(sum.rows())).cwiseAbs().maxCoeff();
        if (defect > tol::povm)
            throw InvalidOperator("Povm: effects sum to identity only within " +
                                  std::to_string(defect));
    }

    const std::vector<EffectOperator>& effects() const { return effects_; }
    std::size_t n_outcomes() const { return effects_.size(); }
    const SubsystemShape& shape() const { return effects_.front().shape(); }

    /// Single-outcome POVM {1}; the learner that ignores its data.
    static Povm trivial(const SubsystemShape& shape) {
        return Povm({EffectOperator(identity_matrix(shape.total_dim()), shape)});
    }

private:
    std::vector<EffectOperator> effects_;
};

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// A CPTP map in Kraus form. Trace preservation (sum K^dag K = 1) is
/// validated; complete positivity is automatic from the Kraus representation.
class Channel {
public:
    Channel(std::vector<Matrix> kraus, SubsystemShape in_shape, SubsystemShape out_shape)
        : kraus_(std::move(kraus)),
          in_shape_(std::move(in_shape)),
          out_shape_(std::move(out_shape)) {
        if (kraus_.empty()) throw InvalidOperator("Channel: no Kraus operators");
        const long long din = in_shape_.total_dim();
        const long long dout = out_shape_.total_dim();
        Matrix sum = Matrix::Zero(din, din);
        for (const auto& k : kraus_) {
            if (k.rows() != dout || k.cols() != din)
                throw ShapeMismatch("Channel: Kraus operator of size " + std::to_string(k.rows()) +
                                    "x" + std::to_string(k.cols()) + " does not map " +
                                    in_shape_.to_string() + " to " + out_shape_.to_string());
            sum += (k.adjoint() * k).eval();
        }
        const double defect = (sum - identity_matrix(din)).cwiseAbs().maxCoeff();
        if (defect > tol::povm)
            throw InvalidOperator("Channel: trace preservation violated by " +
                                  std::to_string(defect));
    }

    const std::vector<Matrix>& kraus() const { return kraus_; }
    const SubsystemShape& in_shape() const { return in_shape_; }
    const SubsystemShape& out_shape() const { return out_shape_; }

    /// Schroedinger action on a raw matrix of matching input dimension.
    Matrix apply_raw(const Matrix& rho) const {
        Matrix out = Matrix::Zero(out_shape_.total_dim(), out_shape_.total_dim());
        for (const auto& k : kraus_) out += k * rho * k.adjoint();
        return out;
    }

    /// Heisenberg action on a raw observable of matching output dimension.
    Matrix dual_raw(const Matrix& obs) const {
        Matrix out = Matrix::Zero(in_shape_.total_dim(), in_shape_.total_dim());
        for (const auto& k : kraus_) out += k.adjoint() * obs * k;
        return out;
    }

    static Channel identity(const SubsystemShape& shape) {
        return Channel({identity_matrix(shape.total_dim())}, shape, shape);
    }

    /// Full trace onto a trivial one-dimensional hypothesis register.
    static Channel trace_out(const SubsystemShape& in_shape, const std::string& out_label) {
        const long long d = in_shape.total_dim();
        std::vector<Matrix> kraus;
        for (long long i = 0; i < d; ++i) {
            Matrix k = Matrix::Zero(1, d);
            k(0, i) = 1.0;
            kraus.push_back(k);
        }
        return Channel(std::move(kraus), in_shape, SubsystemShape({out_label}, {1}));
    }

    static Channel depolarizing(const SubsystemShape& shape, double strength) {
        const long long d = shape.total_dim();
        std::vector<Matrix> kraus;
        kraus.push_back(std::sqrt(1.0 - strength) * identity_matrix(d));
        // Replace-with-maximally-mixed Kraus pieces |i><j| / sqrt(d).
        for (long long i = 0; i < d; ++i)
            for (long long j = 0; j < d; ++j) {
                Matrix k = Matrix::Zero(d, d);
                k(i, j) = std::sqrt(strength / static_cast<double>(d));
                kraus.push_back(k);
            }
        return Channel(std::move(kraus), shape, shape);
    }

private:
    std::vector<Matrix> kraus_;
    SubsystemShape in_shape_;
    SubsystemShape out_shape_;
};

// ---------------------------------------------------------------------------
// POVM measurement with post-measurement states
// ---------------------------------------------------------------------------

struct MeasurementOutcome {
    double prob = 0.0;
    /// Lueders state sqrt(E) rho sqrt(E) / p; empty when prob <= p_floor.
    std::optional<DensityOperator> post;
};

/// Measure `povm` on the subsystems named by `on` (identity elsewhere).
inline std::vector<MeasurementOutcome> measure_povm(const DensityOperator& state,
                                                    const Povm& povm,
                                                    const std::vector<std::string>& on) {
    if (povm.shape().labels() != on)
        throw ShapeMismatch("measure_povm: POVM labels do not match the measured subsystems");
    std::vector<MeasurementOutcome> outcomes;
    outcomes.reserve(povm.n_outcomes());
    double total = 0.0;
    for (const auto& effect : povm.effects()) {
        Matrix e_full = embed_matrix(effect.matrix(), on, state.shape());
        const double p = (e_full * state.matrix()).trace().real();
        MeasurementOutcome o;
        o.prob = p < 0.0 ? 0.0 : p;
        if (o.prob > tol::p_floor) {
            Matrix sqrt_e = embed_matrix(matrix_sqrt(effect.matrix()), on, state.shape());
            Matrix post = sqrt_e * state.matrix() * sqrt_e / o.prob;
            o.post = DensityOperator(post, state.shape());
        }
        total += o.prob;
        outcomes.push_back(std::move(o));
    }
    if (std::abs(total - 1.0) > tol::povm)
        throw SolverFailure("measure_povm: outcome probabilities sum to " + std::to_string(total));
    return outcomes;
}

// ---------------------------------------------------------------------------
// Channel application on subsystems
// ---------------------------------------------------------------------------

/// Apply `ch` to the subsystems named by `on`. The result carries the kept
/// subsystems (in their original order) followed by the channel's output
/// subsystems.
inline DensityOperator apply_channel(const DensityOperator& state, const Channel& ch,
                                     const std::vector<std::string>& on) {
    if (ch.in_shape().labels() != on)
        throw ShapeMismatch("apply_channel: channel input labels do not match target subsystems");
    const auto on_pos = state.shape().positions_of(on);  // throws UnknownLabel
    SubsystemShape kept = state.shape().complement(on_pos);
    for (const auto& l : ch.out_shape().labels())
        if (kept.has_label(l))
            throw ShapeMismatch("apply_channel: output label '" + l + "' collides with kept label");

    // Put the acted subsystems last, then act on the trailing block.
    std::vector<std::string> order = kept.labels();
    order.insert(order.end(), on.begin(), on.end());
    Matrix arranged = permute_subsystems(state.matrix(), state.shape(), order);

    const long long dk = kept.total_dim();
    const long long dout = ch.out_shape().total_dim();
    Matrix result = Matrix::Zero(dk * dout, dk * dout);
    for (const auto& k : ch.kraus()) {
        Matrix kk = kron(identity_matrix(dk), k);
        result += kk * arranged * kk.adjoint();
    }
    return DensityOperator(result, SubsystemShape::concat(kept, ch.out_shape()));
}

/// Heisenberg dual of the channel applied to an observable on its output
/// space: obs -> sum K^dag obs K.
inline HermitianObservable heisenberg_dual(const Channel& ch, const HermitianObservable& obs) {
    if (obs.dim() != ch.out_shape().total_dim())
        throw ShapeMismatch("heisenberg_dual: observable does not live on the channel output");
    return HermitianObservable(ch.dual_raw(obs.matrix()), ch.in_shape());
}

/// Heisenberg dual of (identity (x) ch) for an observable whose shape contains
/// the channel's output labels. Result carries kept labels then input labels.
inline HermitianObservable heisenberg_dual_embedded(const Channel& ch,
                                                    const HermitianObservable& obs) {
    const auto& out_labels = ch.out_shape().labels();
    const auto out_pos = obs.shape().positions_of(out_labels);
    SubsystemShape kept = obs.shape().complement(out_pos);
    std::vector<std::string> order = kept.labels();
    order.insert(order.end(), out_labels.begin(), out_labels.end());
    Matrix arranged = permute_subsystems(obs.matrix(), obs.shape(), order);

    const long long dk = kept.total_dim();
    Matrix result = Matrix::Zero(dk * ch.in_shape().total_dim(),
                                 dk * ch.in_shape().total_dim());
    for (const auto& k : ch.kraus()) {
        Matrix kk = kron(identity_matrix(dk), k);
        result += kk.adjoint() * arranged * kk;
    }
    return HermitianObservable(result, SubsystemShape::concat(kept, ch.in_shape()));
}

// ---------------------------------------------------------------------------
// CQ ensembles and learners
// ---------------------------------------------------------------------------

struct CqEntry {
    std::string label;        // human-readable record, e.g. "0,1,1"
    std::vector<int> record;  // per-sample classical symbols, may be empty
    double prob = 0.0;
    DensityOperator state;    // on test (x) train
};

/// Finite CQ data ensemble: classical records with probabilities and attached
/// bipartite quantum states.
class CQEnsemble {
public:
    CQEnsemble(std::vector<CqEntry> entries, std::vector<std::string> test_labels,
               std::vector<std::string> train_labels)
        : entries_(std::move(entries)),
          test_labels_(std::move(test_labels)),
          train_labels_(std::move(train_labels)) {
        if (entries_.empty()) throw InvalidOperator("CQEnsemble: no entries");
        const auto& shape = entries_.front().state.shape();
        double total = 0.0;
        for (const auto& e : entries_) {
            if (e.prob < 0.0) throw InvalidOperator("CQEnsemble: negative probability");
            if (e.state.shape() != shape)
                throw ShapeMismatch("CQEnsemble: states live on different shapes");
            total += e.prob;
        }
        if (std::abs(total - 1.0) > tol::trace)
            throw InvalidOperator("CQEnsemble: probabilities sum to " + std::to_string(total));
        if (test_labels_.size() + train_labels_.size() != shape.size())
            throw ShapeMismatch("CQEnsemble: test and train labels must partition the shape");
        for (const auto& l : test_labels_) shape.index_of(l);
        for (const auto& l : train_labels_) {
            shape.index_of(l);
            for (const auto& t : test_labels_)
                if (t == l) throw ShapeMismatch("CQEnsemble: label in both test and train: " + l);
        }
    }

    const std::vector<CqEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::string>& test_labels() const { return test_labels_; }
    const std::vector<std::string>& train_labels() const { return train_labels_; }
    const SubsystemShape& data_shape() const { return entries_.front().state.shape(); }

    DensityOperator test_marginal(std::size_t s) const {
        return partial_trace(entries_[s].state, test_labels_);
    }
    DensityOperator train_marginal(std::size_t s) const {
        return partial_trace(entries_[s].state, train_labels_);
    }

private:
    std::vector<CqEntry> entries_;
    std::vector<std::string> test_labels_;
    std::vector<std::string> train_labels_;
};

/// Per-site factorized structure declaration: data, measurements, and
/// channels split as tensor products over sample sites. Sites are validated
/// against the assembled global objects by validate_factorized().
struct FactorizedDeclaration {
    int sites = 0;
    /// Local data state at (site, symbol) on test_i (x) train_i; the shape
    /// must carry exactly two labels in that order.
    std::function<DensityOperator(int site, int symbol)> local_state;
    /// Local POVM effect at (site, symbol, hypothesis); null when the learner
    /// produces only a classical hypothesis.
    std::function<EffectOperator(int site, int symbol, int hyp)> local_effect;
    /// Local channel at (site, symbol, hypothesis); null when trivial.
    std::function<Channel(int site, int symbol, int hyp)> local_channel;
};

/// A learner: one POVM per classical record (outcomes = hypotheses) and one
/// channel per (record, hypothesis) pair mapping train to hyp.
struct Learner {
    std::vector<Povm> povm_for;                      // indexed like the ensemble entries
    std::function<Channel(int s, int w)> channel_for;
    SubsystemShape hyp_shape;
    std::optional<FactorizedDeclaration> factorized;

    std::size_t n_hypotheses() const { return povm_for.empty() ? 0 : povm_for[0].n_outcomes(); }
};

namespace detail {

/// Choi matrix of a channel, on (in, out) with the channel's own labels.
inline std::pair<Matrix, SubsystemShape> choi_matrix(const Channel& ch) {
    const long long din = ch.in_shape().total_dim();
    const long long dout = ch.out_shape().total_dim();
    Matrix j = Matrix::Zero(din * dout, din * dout);
    for (long long a = 0; a < din; ++a)
        for (long long b = 0; b < din; ++b) {
            Matrix unit = Matrix::Zero(din, din);
            unit(a, b) = 1.0;
            Matrix mapped = ch.apply_raw(unit);
            for (long long x = 0; x < dout; ++x)
                for (long long y = 0; y < dout; ++y)
                    j(a * dout + x, b * dout + y) = mapped(x, y);
        }
    return {j, SubsystemShape::concat(ch.in_shape(), ch.out_shape())};
}

}  // namespace detail

/// Check that a declared per-site factorization assembles to the learner's
/// global POVM effects and channels within 1e-10. Throws NotFactorized on a
/// missing declaration or a defect beyond tolerance.
inline void validate_factorized(const CQEnsemble& ens, const Learner& lr) {
    if (!lr.factorized.has_value())
        throw NotFactorized("validate_factorized: no declaration present");
    const auto& fac = *lr.factorized;
    const double tolerance = 1e-10;
    for (std::size_t s = 0; s < ens.size(); ++s) {
        const auto& record = ens.entries()[s].record;
        if (static_cast<int>(record.size()) != fac.sites)
            throw NotFactorized("validate_factorized: record length mismatch");
        for (std::size_t w = 0; w < lr.n_hypotheses(); ++w) {
            if (fac.local_effect) {
                Matrix assembled = Matrix::Identity(1, 1);
                for (int i = 0; i < fac.sites; ++i)
                    assembled = kron(assembled,
                                     fac.local_effect(i, record[static_cast<std::size_t>(i)],
                                                      static_cast<int>(w))
                                         .matrix());
                const auto& global = lr.povm_for[s].effects()[w].matrix();
                if ((assembled - global).cwiseAbs().maxCoeff() > tolerance)
                    throw NotFactorized("validate_factorized: POVM effect defect at (" +
                                        ens.entries()[s].label + ", " + std::to_string(w) + ")");
            }
            if (fac.local_channel) {
                Matrix prod_choi = Matrix::Identity(1, 1);
                std::vector<std::string> interleaved;
                std::vector<int> interleaved_dims;
                std::vector<std::string> ins, outs;
                for (int i = 0; i < fac.sites; ++i) {
                    Channel local =
                        fac.local_channel(i, record[static_cast<std::size_t>(i)],
                                          static_cast<int>(w));
                    auto [j, jshape] = detail::choi_matrix(local);
                    prod_choi = kron(prod_choi, j);
                    for (std::size_t k = 0; k < jshape.size(); ++k) {
                        interleaved.push_back(jshape.labels()[k]);
                        interleaved_dims.push_back(jshape.dims()[k]);
                    }
                    for (const auto& l : local.in_shape().labels()) ins.push_back(l);
                    for (const auto& l : local.out_shape().labels()) outs.push_back(l);
                }
                SubsystemShape prod_shape(interleaved, interleaved_dims);
                std::vector<std::string> target = ins;
                target.insert(target.end(), outs.begin(), outs.end());
                Matrix rearranged = permute_subsystems(prod_choi, prod_shape, target);
                auto [global_choi, gshape] =
                    detail::choi_matrix(lr.channel_for(static_cast<int>(s), static_cast<int>(w)));
                if (gshape.labels() != target)
                    throw NotFactorized("validate_factorized: channel label layout mismatch");
                if ((rearranged - global_choi).cwiseAbs().maxCoeff() > tolerance)
                    throw NotFactorized("validate_factorized: channel defect at (" +
                                        ens.entries()[s].label + ", " + std::to_string(w) + ")");
            }
        }
    }
}

/// Joint distribution P(s, w) = p(s) tr[E_s(w) rho_train(s)]. Outcomes with
/// probability at or below p_floor are dropped (mass deficit tolerated up to
/// the configured bound, no renormalization).
inline JointDistribution learner_joint(const CQEnsemble& ens, const Learner& lr) {
    if (lr.povm_for.size() != ens.size())
        throw ShapeMismatch("learner_joint: one POVM per classical record required");
    const std::size_t n_w = lr.n_hypotheses();
    Eigen::MatrixXd mass(ens.size(), n_w);
    for (std::size_t s = 0; s < ens.size(); ++s) {
        if (lr.povm_for[s].n_outcomes() != n_w)
            throw ShapeMismatch("learner_joint: POVMs disagree on the hypothesis count");
        const Matrix rho_train = ens.train_marginal(s).matrix();
        for (std::size_t w = 0; w < n_w; ++w) {
            const double q =
                (lr.povm_for[s].effects()[w].matrix() * rho_train).trace().real();
            const double p = ens.entries()[s].prob * q;
            mass(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(w)) =
                (p > tol::p_floor) ? p : 0.0;
        }
    }
    const double deficit = std::abs(mass.sum() - 1.0);
    if (deficit > tol::mass_deficit)
        throw SolverFailure("learner_joint: dropped outcome mass " + std::to_string(deficit) +
                            " exceeds tolerance");
    return JointDistribution(mass, tol::mass_deficit);
}

/// Post-measurement state of the full data register after observing w, before
/// the channel acts: on test (x) train.
inline DensityOperator post_measurement_state(const CQEnsemble& ens, const Learner& lr, int s,
                                              int w) {
    const auto& entry = ens.entries()[static_cast<std::size_t>(s)];
    const auto& effect = lr.povm_for[static_cast<std::size_t>(s)].effects()[static_cast<std::size_t>(w)];
    const Matrix rho_train = ens.train_marginal(static_cast<std::size_t>(s)).matrix();
    const double q = (effect.matrix() * rho_train).trace().real();
    if (q <= tol::p_floor)
        throw ZeroProbabilityOutcome("post-measurement state undefined: outcome probability " +
                                     std::to_string(q));
    Matrix sqrt_e = embed_matrix(matrix_sqrt(effect.matrix()), ens.train_labels(),
                                 entry.state.shape());
    return DensityOperator(sqrt_e * entry.state.matrix() * sqrt_e / q, entry.state.shape());
}

/// Learner output sigma(s, w) = (id_test (x) channel_{s,w})(post-measurement
/// state), a density operator on test (x) hyp.
inline DensityOperator learner_output_state(const CQEnsemble& ens, const Learner& lr, int s,
                                            int w) {
    DensityOperator post = post_measurement_state(ens, lr, s, w);
    Channel ch = lr.channel_for(s, w);
    return apply_channel(post, ch, ens.train_labels());
}

/// Decoupled reference tau(s, w) = rho_test(s) (x) sigma_hyp(s, w).
inline DensityOperator decoupled_state(const CQEnsemble& ens, const Learner& lr, int s, int w) {
    DensityOperator sigma = learner_output_state(ens, lr, s, w);
    DensityOperator sigma_hyp = partial_trace(sigma, lr.hyp_shape.labels());
    return tensor_product(ens.test_marginal(static_cast<std::size_t>(s)), sigma_hyp);
}

/// Decoupled reference built from an already computed output state.
inline DensityOperator decoupled_state_from(const CQEnsemble& ens, const Learner& lr, int s,
                                            const DensityOperator& sigma) {
    DensityOperator sigma_hyp = partial_trace(sigma, lr.hyp_shape.labels());
    return tensor_product(ens.test_marginal(static_cast<std::size_t>(s)), sigma_hyp);
}

}  // namespace qgen
