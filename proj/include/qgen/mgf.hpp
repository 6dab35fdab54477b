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

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "qgen/operators.hpp"
#include "qgen/qmat.hpp"

namespace qgen {

namespace mgf_params {

inline constexpr double lambda_min = 1e-3;   // smallest grid magnitude
inline constexpr double lambda_max = 1e2;    // largest grid magnitude
inline constexpr int points_per_side = 61;
inline constexpr double dual_lambda_cap = 1e3;   // Legendre search window
inline constexpr double dual_t_cap = 1e4;        // inverse search window
inline constexpr double dual_inverse_tol = 1e-10;
inline constexpr double convexity_tol = 1e-8;

}  // namespace mgf_params

// ---------------------------------------------------------------------------
// Log moment generating functions
// ---------------------------------------------------------------------------

namespace detail {

inline double log_sum_exp(const std::vector<double>& logs, const std::vector<double>& weights) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logs.size(); ++i)
        if (weights[i] > 0.0) m = std::max(m, logs[i]);
    if (!std::isfinite(m)) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i)
        if (weights[i] > 0.0) acc += weights[i] * std::exp(logs[i] - m);
    return m + std::log(acc);
}

/// Spectral data of the centered observable against a fixed state, enough to
/// evaluate the log-MGF at any lambda in O(d).
struct CenteredSpectrum {
    std::vector<double> eigs;     // eigenvalues of L - tr[L tau] 1
    std::vector<double> weights;  // diagonal of tau in that eigenbasis (>= 0)

    double log_mgf(double lambda) const {
        std::vector<double> logs(eigs.size());
        for (std::size_t i = 0; i < eigs.size(); ++i) logs[i] = lambda * eigs[i];
        return log_sum_exp(logs, weights);
    }
};

inline CenteredSpectrum center_against(const Matrix& tau, const Matrix& loss) {
    const double mean = (loss * tau).trace().real();
    Matrix m = loss - mean * identity_matrix(loss.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw SolverFailure("quantum_log_mgf: eigendecomposition failed");
    CenteredSpectrum cs;
    cs.eigs.resize(static_cast<std::size_t>(m.rows()));
    cs.weights.resize(static_cast<std::size_t>(m.rows()));
    Matrix tau_rot = es.eigenvectors().adjoint() * tau * es.eigenvectors();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        cs.eigs[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
        const double w = tau_rot(i, i).real();
        cs.weights[static_cast<std::size_t>(i)] = w > 0.0 ? w : 0.0;
    }
    return cs;
}

}  // namespace detail

/// Centered quantum log-MGF: log tr[tau e^{lambda (L - tr[L tau] 1)}].
inline double quantum_log_mgf(const DensityOperator& tau, const HermitianObservable& loss,
                              double lambda) {
    if (tau.dim() != loss.dim()) throw ShapeMismatch("quantum_log_mgf: dimension mismatch");
    return detail::center_against(tau.matrix(), loss.matrix()).log_mgf(lambda);
}

/// Golden-Thompson-weakened form: log tr[exp(log tau + lambda (L - tr[L tau] 1))].
/// Requires a full-rank reference state. Lies at or below the standard form.
inline double quantum_log_mgf_gt(const DensityOperator& tau, const HermitianObservable& loss,
                                 double lambda) {
    if (tau.dim() != loss.dim()) throw ShapeMismatch("quantum_log_mgf_gt: dimension mismatch");
    const double mean = (loss.matrix() * tau.matrix()).trace().real();
    Matrix inner = matrix_log(tau.matrix(), LogPolicy::strict) +
                   lambda * (loss.matrix() - mean * identity_matrix(loss.dim()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint().eval()),
                                             Eigen::EigenvaluesOnly);
    std::vector<double> logs(static_cast<std::size_t>(es.eigenvalues().size()));
    std::vector<double> ones(logs.size(), 1.0);
    for (std::size_t i = 0; i < logs.size(); ++i)
        logs[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    return detail::log_sum_exp(logs, ones);
}

/// Centered classical log-MGF of a finite (prob, value) distribution.
inline double classical_log_mgf(const std::vector<std::pair<double, double>>& samples,
                                double lambda) {
    double mass = 0.0;
    double mean = 0.0;
    for (const auto& [p, x] : samples) {
        if (p < -tol::p_floor) throw InvalidOperator("classical_log_mgf: negative probability");
        mass += p;
        mean += p * x;
    }
    if (std::abs(mass - 1.0) > tol::povm)
        throw InvalidOperator("classical_log_mgf: probabilities sum to " + std::to_string(mass));
    mean /= mass;
    std::vector<double> logs;
    std::vector<double> weights;
    logs.reserve(samples.size());
    weights.reserve(samples.size());
    for (const auto& [p, x] : samples) {
        logs.push_back(lambda * (x - mean));
        weights.push_back(p / mass);
    }
    return detail::log_sum_exp(logs, weights);
}

// ---------------------------------------------------------------------------
// Profiles over a lambda grid
// ---------------------------------------------------------------------------

/// Symmetric log-spaced grid including 0: +-[1e-3, 1e2] with 61 points per
/// side. Captures both the curvature near zero and tail behavior.
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    const double lmin = std::log(mgf_params::lambda_min);
    const double lmax = std::log(mgf_params::lambda_max);
    const int n = mgf_params::points_per_side;
    for (int i = n - 1; i >= 0; --i)
        grid.push_back(-std::exp(lmin + (lmax - lmin) * i / (n - 1)));
    grid.push_back(0.0);
    for (int i = 0; i < n; ++i) grid.push_back(std::exp(lmin + (lmax - lmin) * i / (n - 1)));
    return grid;
}

enum class MgfMode { quantum, quantum_gt, classical };

/// A log-MGF sampled on a grid, with the generating callable retained so
/// fits can refine off-grid.
struct LogMgfProfile {
    std::vector<double> lambda_grid;
    std::vector<double> values;
    std::function<double(double)> evaluator;
    MgfMode mode = MgfMode::classical;

    /// Piecewise-linear upper envelope of one side of the profile; valid as a
    /// convex upper bound because chords of a convex function lie above it.
    /// Throws RangeExhausted outside the sampled range.
    double chord_upper(double lambda) const {
        if (lambda == 0.0) return 0.0;
        auto it = std::lower_bound(lambda_grid.begin(), lambda_grid.end(), lambda);
        if (it == lambda_grid.begin() || it == lambda_grid.end())
            throw RangeExhausted("log-MGF profile queried outside its grid");
        const std::size_t hi = static_cast<std::size_t>(it - lambda_grid.begin());
        const std::size_t lo = hi - 1;
        const double t = (lambda - lambda_grid[lo]) / (lambda_grid[hi] - lambda_grid[lo]);
        return (1.0 - t) * values[lo] + t * values[hi];
    }
};

inline LogMgfProfile make_profile(std::function<double(double)> psi,
                                  MgfMode mode = MgfMode::classical,
                                  std::vector<double> grid = default_lambda_grid()) {
    LogMgfProfile profile;
    profile.lambda_grid = std::move(grid);
    profile.values.reserve(profile.lambda_grid.size());
    for (double l : profile.lambda_grid) profile.values.push_back(l == 0.0 ? 0.0 : psi(l));
    profile.evaluator = std::move(psi);
    profile.mode = mode;
    const auto zero_it =
        std::find(profile.lambda_grid.begin(), profile.lambda_grid.end(), 0.0);
    if (zero_it == profile.lambda_grid.end())
        throw InvalidOperator("log-MGF grid must include 0");
    return profile;
}

inline LogMgfProfile quantum_profile(const DensityOperator& tau, const HermitianObservable& loss,
                                     std::vector<double> grid = default_lambda_grid()) {
    auto spectrum = detail::center_against(tau.matrix(), loss.matrix());
    return make_profile([spectrum](double l) { return spectrum.log_mgf(l); }, MgfMode::quantum,
                        std::move(grid));
}

inline LogMgfProfile quantum_profile_gt(const DensityOperator& tau,
                                        const HermitianObservable& loss,
                                        std::vector<double> grid = default_lambda_grid()) {
    return make_profile([tau, loss](double l) { return quantum_log_mgf_gt(tau, loss, l); },
                        MgfMode::quantum_gt, std::move(grid));
}

inline LogMgfProfile classical_profile(std::vector<std::pair<double, double>> samples,
                                       std::vector<double> grid = default_lambda_grid()) {
    return make_profile(
        [samples = std::move(samples)](double l) { return classical_log_mgf(samples, l); },
        MgfMode::classical, std::move(grid));
}

// ---------------------------------------------------------------------------
// Sub-gaussian fitting
// ---------------------------------------------------------------------------

struct SubGaussianFit {
    double alpha = 0.0;
    double attained_at = 0.0;   // lambda of the dominating ratio
    MgfMode mode = MgfMode::classical;
    bool convex_ok = true;      // false flags a NonConvexProfile warning
};

namespace detail {

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 80) {
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Tightest quadratic alpha^2 lambda^2 / 2 dominating the sampled profile:
/// alpha^2 equals the sup of 2 psi(lambda) / lambda^2 over the grid and a 10x
/// finer validation grid, refined by golden-section search near the argmax.
/// Grid-accurate by construction; certified on the validation grid.
inline SubGaussianFit fit_subgaussian(const LogMgfProfile& profile) {
    const auto& grid = profile.lambda_grid;
    const auto& vals = profile.values;
    if (grid.size() < 3) throw InvalidOperator("fit_subgaussian: grid too small");

    SubGaussianFit fit;
    fit.mode = profile.mode;

    // Convexity audit via second differences.
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double slope_l = (vals[i] - vals[i - 1]) / (grid[i] - grid[i - 1]);
        const double slope_r = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
        if (slope_r - slope_l < -mgf_params::convexity_tol) fit.convex_ok = false;
    }

    const auto ratio = [&](double l) {
        if (l == 0.0) return 0.0;
        return 2.0 * profile.evaluator(l) / (l * l);
    };

    double best = 0.0;
    double best_at = 0.0;
    // Grid points plus a 10x refinement between neighbors.
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        for (int sub = 0; sub < 10; ++sub) {
            const double l = grid[i] + (grid[i + 1] - grid[i]) * sub / 10.0;
            if (std::abs(l) < mgf_params::lambda_min) continue;
            const double r = (sub == 0) ? (grid[i] == 0.0 ? 0.0 : 2.0 * vals[i] / (grid[i] * grid[i]))
                                        : ratio(l);
            if (r > best) {
                best = r;
                best_at = l;
            }
        }
    }
    {
        const double l = grid.back();
        const double r = 2.0 * vals.back() / (l * l);
        if (r > best) {
            best = r;
            best_at = l;
        }
    }

    if (profile.evaluator && best_at != 0.0) {
        // Local refinement around the argmax, bounded away from zero where the
        // ratio loses precision.
        const double span = std::abs(best_at);
        double lo = best_at - 0.5 * span;
        double hi = best_at + 0.5 * span;
        if (best_at > 0.0)
            lo = std::max(lo, mgf_params::lambda_min);
        else
            hi = std::min(hi, -mgf_params::lambda_min);
        const double refined = detail::golden_max(ratio, lo, hi);
        const double r = ratio(refined);
        if (r > best) {
            best = r;
            best_at = refined;
        }
    }

    fit.alpha = std::sqrt(std::max(0.0, best));
    fit.attained_at = best_at;
    return fit;
}

/// Sub-gaussianity parameter of an average (1/m) sum of independent local
/// pieces: sqrt(sum alpha_i^2) / m.
inline double compose_local_subgaussian(const std::vector<double>& alphas, int m) {
    if (m < 1) throw InvalidOperator("compose_local_subgaussian: m must be positive");
    double acc = 0.0;
    for (double a : alphas) {
        if (a < 0.0) throw InvalidOperator("compose_local_subgaussian: negative parameter");
        acc += a * a;
    }
    return std::sqrt(acc) / static_cast<double>(m);
}

// ---------------------------------------------------------------------------
// Fenchel-Legendre machinery
// ---------------------------------------------------------------------------

namespace detail {

struct DualEval {
    double value = 0.0;
    bool boundary = false;  // sup attained at the edge of the search window
};

/// Restricted dual sup_{|lambda| <= cap} {lambda t - psi(lambda)}. The
/// objective is concave for convex psi, so golden-section search applies.
inline DualEval legendre_dual_eval(const std::function<double(double)>& psi, double t,
                                   double cap) {
    const auto g = [&](double l) { return l * t - psi(l); };
    const double arg = golden_max(g, -cap, cap);
    DualEval out;
    out.value = g(arg);
    out.boundary = std::abs(arg) > 0.999 * cap;
    return out;
}

}  // namespace detail

/// Fenchel-Legendre dual evaluated by bounded 1-D maximization. Raises
/// RangeExhausted when the sup is attained at the search boundary.
inline std::function<double(double)> legendre_dual(std::function<double(double)> psi,
                                                   double lambda_cap = mgf_params::dual_lambda_cap) {
    return [psi = std::move(psi), lambda_cap](double t) {
        const auto eval = detail::legendre_dual_eval(psi, t, lambda_cap);
        if (eval.boundary)
            throw RangeExhausted("legendre_dual: supremum attained at the search boundary");
        return eval.value;
    };
}

/// Generalized inverse psi*^{-1}(s) = inf{t >= 0 | psi*(t) > s}, found by
/// monotone bisection. The predicate psi*(t) > s is decided conservatively:
/// a boundary-attained restricted sup only counts once it already exceeds s,
/// extending the window as needed; the reported inverse is never smaller than
/// the true generalized inverse by more than the bisection tolerance.
inline double legendre_dual_inverse(const std::function<double(double)>& psi, double s,
                                    double lambda_cap = mgf_params::dual_lambda_cap,
                                    double t_cap = mgf_params::dual_t_cap) {
    if (s < 0.0) throw InvalidOperator("legendre_dual_inverse: s must be nonnegative");

    const auto exceeds = [&](double t) -> bool {
        double cap = lambda_cap;
        for (;;) {
            const auto eval = detail::legendre_dual_eval(psi, t, cap);
            if (eval.value > s) return true;  // restricted sup is a lower bound on psi*
            if (!eval.boundary) return false;
            if (cap >= 1e15) return false;  // undecided: treat as below, enlarging the inverse
            cap *= 10.0;
        }
    };

    if (exceeds(0.0)) return 0.0;
    if (!exceeds(t_cap))
        throw RangeExhausted("legendre_dual_inverse: inverse exceeds the t window");

    double lo = 0.0, hi = t_cap;
    while (hi - lo > mgf_params::dual_inverse_tol) {
        const double mid = 0.5 * (lo + hi);
        if (exceeds(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace qgen
