// SPDX-License-Identifier: Apache-2.0
//
// Pathwise likelihood-ratio functionals and the Monte Carlo estimators built
// on them. Everything is sampled under the law of the second process: the
// Gaussian exponent C_T in closed form, the jump exponent D_T from a simulated
// jump record. Replication i draws only from (seed, i), and results are
// reduced in index order, so the worker count never changes a single bit.
#pragma once

#include "addgap/bounds.hpp"
#include "addgap/error.hpp"
#include "addgap/measures.hpp"
#include "addgap/processes.hpp"
#include "addgap/quadrature.hpp"
#include "addgap/rng.hpp"
#include "addgap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace addgap {

inline constexpr double kConfidenceMultiplier = 1.96;
inline constexpr double kSplitSlack = 1e-12;

struct EstimateResult {
    double mean = 0.0;
    double half_width_95 = 0.0;
    std::uint64_t n_paths = 0;
    double truncation_epsilon = 0.0;
    std::uint64_t seed = 0;
    bool truncated_proxy = false;
};

struct LikelihoodTerms {
    double d_t = 0.0;
    double a_plus = 0.0;
    double a_minus = 0.0;
    double c_t = 0.0;
};

/// |1 - e^(x+y)| <= (1+e^x)/2 |1-e^y| + (1+e^y)/2 |1-e^x|, with relative slack.
inline bool splitting_inequality_holds(double x, double y, double rel_slack = kSplitSlack) {
    const double lhs = std::abs(std::expm1(x + y));
    const double rhs = 0.5 * (1.0 + std::exp(x)) * std::abs(std::expm1(y)) +
                       0.5 * (1.0 + std::exp(y)) * std::abs(std::expm1(x));
    return lhs <= rhs * (1.0 + rel_slack);
}

/// Precomputed pieces of the jump log-likelihood ratio for a measure pair at
/// one truncation level. With epsilon = 0 both measures must be finite.
class LikelihoodRatio {
public:
    LikelihoodRatio(const LevyMeasure& nu1, const LevyMeasure& nu2, double epsilon)
        : nu1_(nu1), nu2_(nu2), epsilon_(epsilon), identical_(nu1 == nu2) {
        if (identical_) {
            return;
        }
        const auto comp = ratio_compensators(nu1, nu2, epsilon);
        plus_ = comp.plus;
        minus_ = comp.minus;
    }

    /// ln(d nu1 / d nu2)(y); -inf where nu1 has no mass.
    [[nodiscard]] double log_ratio(double y) const {
        if (identical_) {
            return 0.0;
        }
        const double d2 = density_at(nu2_, y);
        if (!(d2 > 0.0)) {
            fail(ErrorKind::RatioUndefined, "jump at y = " + std::to_string(y) +
                                                " where the second density vanishes");
        }
        const double d1 = density_at(nu1_, y);
        if (d1 == 0.0) {
            return -kInfinity;
        }
        return std::log(d1 / d2);
    }

    /// Restricted mass difference per unit time: integral of (nu1 - nu2) over |y| > epsilon.
    [[nodiscard]] double mass_gap() const { return plus_ + minus_; }
    [[nodiscard]] double plus() const { return plus_; }
    [[nodiscard]] double minus() const { return minus_; }

    [[nodiscard]] LikelihoodTerms terms(const JumpRecord& jumps, double horizon,
                                        double c_t = 0.0) const {
        LikelihoodTerms out;
        out.c_t = c_t;
        if (identical_) {
            return out;
        }
        quad::detail::KahanSum all;
        quad::detail::KahanSum up;
        quad::detail::KahanSum down;
        bool vanishes = false;
        for (double y : jumps.sizes) {
            const double l = log_ratio(y);
            if (std::isinf(l)) {
                vanishes = true;
                continue;
            }
            all.add(l);
            (l > 0.0 ? up : down).add(l);
        }
        // Compensators are swapped between the two halves.
        out.a_plus = up.value() - horizon * minus_;
        out.a_minus = vanishes ? -kInfinity : down.value() - horizon * plus_;
        out.d_t = vanishes ? -kInfinity : all.value() - horizon * mass_gap();
        return out;
    }

private:
    LevyMeasure nu1_;
    LevyMeasure nu2_;
    double epsilon_;
    bool identical_;
    double plus_ = 0.0;
    double minus_ = 0.0;
};

inline double jump_loglik_D(const JumpRecord& jumps, const LevyMeasure& nu1,
                            const LevyMeasure& nu2, double horizon) {
    detail::require_abs_continuity(nu1, nu2);
    return LikelihoodRatio(nu1, nu2, jumps.truncation_epsilon).terms(jumps, horizon).d_t;
}

inline std::pair<double, double> split_A_pm(const JumpRecord& jumps, const LevyMeasure& nu1,
                                            const LevyMeasure& nu2, double horizon) {
    detail::require_abs_continuity(nu1, nu2);
    const auto t = LikelihoodRatio(nu1, nu2, jumps.truncation_epsilon).terms(jumps, horizon);
    return {t.a_plus, t.a_minus};
}

// ---------------------------------------------------------------------------
// Deterministic fan-out
// ---------------------------------------------------------------------------

struct RunOptions {
    unsigned threads = 0;  // 0: ADDGAP_THREADS, then hardware concurrency
};

inline unsigned worker_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("ADDGAP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

namespace detail {

// Runs body(i) for i in [0, n) on contiguous chunks; the first exception in
// index order is rethrown after every worker has joined.
template <class Body>
void parallel_for(std::uint64_t n, unsigned threads, const Body& body) {
    const std::uint64_t workers = std::min<std::uint64_t>(std::max(1U, threads), std::max<std::uint64_t>(n, 1));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi = std::min(n, lo + chunk);
            try {
                for (std::uint64_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline EstimateResult summarize(const std::vector<double>& xs, std::uint64_t seed, double epsilon,
                                bool proxy) {
    EstimateResult r;
    r.n_paths = xs.size();
    r.seed = seed;
    r.truncation_epsilon = epsilon;
    r.truncated_proxy = proxy;
    quad::detail::KahanSum sum;
    for (double x : xs) {
        sum.add(x);
    }
    r.mean = sum.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        quad::detail::KahanSum sq;
        for (double x : xs) {
            const double d = x - r.mean;
            sq.add(d * d);
        }
        const double var = sq.value() / static_cast<double>(xs.size() - 1);
        r.half_width_95 = kConfidenceMultiplier * std::sqrt(var / static_cast<double>(xs.size()));
    }
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

namespace detail {

inline bool infinite_activity(const ProblemSpec& spec) {
    return std::isinf(total_mass(spec.p1.levy)) || std::isinf(total_mass(spec.p2.levy));
}

[[noreturn]] inline void hypothesis(const std::string& why) {
    fail(ErrorKind::HypothesisFailed, why);
}

// Everything one replication needs, checked and precomputed once.
struct PathModel {
    double horizon;
    double xi_sq = 0.0;
    double epsilon;
    bool proxy;
    JumpSampler sampler;
    LikelihoodRatio ratio;

    [[nodiscard]] LikelihoodTerms draw(std::uint64_t seed, std::uint64_t i) const {
        RngStream jump_rng(seed, i, kJumpSubstream);
        RngStream gauss_rng(seed, i, kGaussianSubstream);
        const auto jumps = sampler.sample(horizon, jump_rng);
        return ratio.terms(jumps, horizon, sample_C_T(xi_sq, gauss_rng));
    }
};

inline double effective_epsilon(const ProblemSpec& spec, double epsilon) {
    if (!infinite_activity(spec)) {
        return 0.0;
    }
    if (!(epsilon > 0.0)) {
        hypothesis("infinite-activity pair needs a truncation epsilon > 0");
    }
    return epsilon;
}

inline PathModel build_model(const ProblemSpec& spec, double epsilon) {
    const auto ing = compute_ingredients(spec);
    if (ing.sigma_mismatch) {
        hypothesis(reason::kSigmaMismatch);
    }
    if (!ing.abs_continuous) {
        hypothesis(reason::kNotAbsCont);
    }
    if (std::isinf(*ing.hellinger_sq_nu)) {
        hypothesis(reason::kH2Infinite);
    }
    if (!ing.eta) {
        hypothesis(reason::kEtaDivergent);
    }
    if (ing.regime == VolRegime::Zero && !(ing.drift && ing.drift->ok)) {
        hypothesis(reason::kDriftMismatch);
    }
    const double eps = effective_epsilon(spec, epsilon);
    PathModel m{spec.horizon, 0.0, eps, eps > 0.0, JumpSampler(spec.p2.levy, eps),
                LikelihoodRatio(spec.p1.levy, spec.p2.levy, eps)};
    if (ing.regime == VolRegime::Positive) {
        m.xi_sq = *ing.xi_sq;
        if (!std::isfinite(m.xi_sq)) {
            hypothesis("xi^2 infinite");
        }
    }
    return m;
}

template <class Functional>
EstimateResult run(const PathModel& model, std::uint64_t n_paths, std::uint64_t seed,
                   const RunOptions& opts, const Functional& fn) {
    if (n_paths == 0) {
        fail(ErrorKind::InvalidArgument, "n_paths must be > 0");
    }
    std::vector<double> out(n_paths);
    parallel_for(n_paths, worker_count(opts.threads),
                 [&](std::uint64_t i) { out[i] = fn(model.draw(seed, i)); });
    return summarize(out, seed, model.epsilon, model.proxy);
}

}  // namespace detail

/// Mean of |1 - M_T| under the second process: the L1 distance itself for
/// finite-activity pairs, the truncated proxy otherwise.
inline EstimateResult estimate_tv(const ProblemSpec& spec, std::uint64_t n_paths, double epsilon,
                                  std::uint64_t seed, const RunOptions& opts = {}) {
    const auto model = detail::build_model(spec, epsilon);
    return detail::run(model, n_paths, seed, opts, [](const LikelihoodTerms& t) {
        return std::abs(std::expm1(t.c_t + t.d_t));
    });
}

/// Mean of M_T; should be 1.
inline EstimateResult martingale_check(const ProblemSpec& spec, std::uint64_t n_paths,
                                       double epsilon, std::uint64_t seed,
                                       const RunOptions& opts = {}) {
    const auto model = detail::build_model(spec, epsilon);
    return detail::run(model, n_paths, seed, opts,
                       [](const LikelihoodTerms& t) { return std::exp(t.c_t + t.d_t); });
}

/// Mean of e^(A+) - e^(A-), whose expectation is 2 sinh(T L1(nu1, nu2)).
inline EstimateResult estimate_sinh_oracle(const ProblemSpec& spec, std::uint64_t n_paths,
                                           std::uint64_t seed, const RunOptions& opts = {}) {
    if (detail::infinite_activity(spec)) {
        detail::hypothesis("sinh identity needs a finite-activity pair");
    }
    detail::require_abs_continuity(spec.p1.levy, spec.p2.levy);
    // Only the jump parts enter; drift and volatility are irrelevant here.
    detail::PathModel model{spec.horizon, 0.0, 0.0, false, JumpSampler(spec.p2.levy, 0.0),
                            LikelihoodRatio(spec.p1.levy, spec.p2.levy, 0.0)};
    return detail::run(model, n_paths, seed, opts, [](const LikelihoodTerms& t) {
        return std::exp(t.a_plus) - std::exp(t.a_minus);
    });
}

struct TvDiagnostics {
    EstimateResult tv;
    EstimateResult positive_part;  // 2 (1 - M_T)^+, same expectation as |1 - M_T|
    EstimateResult martingale;
    std::uint64_t inequality_violations = 0;
    std::uint64_t sign_violations = 0;  // a_plus < 0 or a_minus > 0
    double max_split_residual = 0.0;    // |a_plus + a_minus - d_t| relative
};

/// One pass over the paths computing the estimate and its internal checks.
inline TvDiagnostics diagnose_tv(const ProblemSpec& spec, std::uint64_t n_paths, double epsilon,
                                 std::uint64_t seed, const RunOptions& opts = {}) {
    const auto model = detail::build_model(spec, epsilon);
    if (n_paths == 0) {
        fail(ErrorKind::InvalidArgument, "n_paths must be > 0");
    }
    std::vector<LikelihoodTerms> terms(n_paths);
    detail::parallel_for(n_paths, worker_count(opts.threads),
                         [&](std::uint64_t i) { terms[i] = model.draw(seed, i); });
    TvDiagnostics out;
    std::vector<double> a(n_paths);
    std::vector<double> b(n_paths);
    std::vector<double> m(n_paths);
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        const auto& t = terms[i];
        const double x = std::expm1(t.c_t + t.d_t);
        a[i] = std::abs(x);
        b[i] = 2.0 * std::max(-x, 0.0);
        m[i] = x + 1.0;
        if (!splitting_inequality_holds(t.c_t, t.d_t)) {
            ++out.inequality_violations;
        }
        if (t.a_plus < 0.0 || t.a_minus > 0.0) {
            ++out.sign_violations;
        }
        if (std::isfinite(t.d_t)) {
            const double scale = std::max({std::abs(t.a_plus), std::abs(t.a_minus), 1.0});
            out.max_split_residual =
                std::max(out.max_split_residual, std::abs(t.a_plus + t.a_minus - t.d_t) / scale);
        }
    }
    out.tv = detail::summarize(a, seed, model.epsilon, model.proxy);
    out.positive_part = detail::summarize(b, seed, model.epsilon, model.proxy);
    out.martingale = detail::summarize(m, seed, model.epsilon, model.proxy);
    return out;
}

}  // namespace addgap
