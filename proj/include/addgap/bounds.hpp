// SPDX-License-Identifier: Apache-2.0
//
// Closed-form upper bounds on the L1 distance between the laws of two
// additive processes on [0, T] sharing sigma^2(.):
//
//   hellinger route:  sqrt(8 (1 - exp(-xi^2/8 - T H^2 / 2)))
//   sinh route:       2 sinh(T L1(nu1, nu2)) + 2 (1 - 2 Phi(-xi / 2))
//   square root:      2 sqrt(T L1(nu1, nu2))          (sigma^2 = 0 only)
//   gaussian exact:   2 (1 - 2 Phi(-xi / 2))          (no jumps)
//
// For sigma^2 = 0 the xi terms drop out and the drifts must satisfy
// f1 - f2 = gamma^nu1 - gamma^nu2.
#pragma once

#include "addgap/error.hpp"
#include "addgap/measures.hpp"
#include "addgap/normal.hpp"
#include "addgap/processes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace addgap {

inline constexpr double kDistanceCeiling = 2.0;

namespace reason {
inline constexpr const char* kSigmaMismatch = "sigma mismatch";
inline constexpr const char* kNotAbsCont = "not absolutely continuous";
inline constexpr const char* kH2Infinite = "H2 infinite";
inline constexpr const char* kL1Infinite = "L1 infinite";
inline constexpr const char* kDriftMismatch = "drift mismatch at sigma=0";
inline constexpr const char* kEtaDivergent = "eta divergent";
inline constexpr const char* kNeedsZeroSigma = "requires sigma^2 = 0";
inline constexpr const char* kNotGaussian = "jumps present";
inline constexpr const char* kZeroVol = "sigma^2 = 0";
}  // namespace reason

/// Everything the bounds are built from, computed once per problem.
struct Ingredients {
    double horizon = 0.0;
    bool sigma_mismatch = false;
    VolRegime regime = VolRegime::Positive;
    bool abs_continuous = true;
    std::vector<double> abs_cont_violations;
    std::optional<double> l1_nu;            // +inf when divergent
    std::optional<double> hellinger_sq_nu;  // +inf when divergent
    std::optional<double> gamma1;           // empty when the small-jump moment diverges
    std::optional<double> gamma2;
    std::optional<double> eta;
    std::optional<double> xi_sq;             // sigma^2 > 0 only
    std::optional<DriftDiagnostic> drift;    // sigma^2 = 0 only
    bool gaussian_case = false;              // nu1 = nu2 = 0
};

inline Ingredients compute_ingredients(const ProblemSpec& spec) {
    validate(spec);
    Ingredients ing;
    ing.horizon = spec.horizon;
    const auto r1 = vol_regime(spec.p1.vol_sq, spec.horizon);
    const auto r2 = vol_regime(spec.p2.vol_sq, spec.horizon);
    ing.sigma_mismatch = r1 != r2 || sigma_mismatch(spec);
    ing.regime = r2;
    ing.gaussian_case = spec.p1.levy.is_zero() && spec.p2.levy.is_zero();

    const auto& nu1 = spec.p1.levy;
    const auto& nu2 = spec.p2.levy;
    try {
        ing.gamma1 = gamma_nu(nu1);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DivergentIntegral) throw;
    }
    try {
        ing.gamma2 = gamma_nu(nu2);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DivergentIntegral) throw;
    }
    try {
        ing.eta = eta(nu1, nu2);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DivergentIntegral) throw;
    }

    const auto ac = check_abs_continuity(nu1, nu2);
    ing.abs_continuous = ac.ok;
    ing.abs_cont_violations = ac.violations;
    if (ac.ok) {
        ing.l1_nu = l1_distance(nu1, nu2);
        ing.hellinger_sq_nu = hellinger_sq(nu1, nu2);
    }

    if (!ing.sigma_mismatch && ing.eta) {
        if (ing.regime == VolRegime::Positive) {
            ing.xi_sq = xi_sq(spec, *ing.eta);
        } else {
            ing.drift = drift_match_check(spec, *ing.eta);
        }
    }
    return ing;
}

/// A bound value, or the reason it does not apply.
struct BoundValue {
    std::optional<double> raw;
    std::string reason;
    ErrorKind failure = ErrorKind::HypothesisFailed;

    [[nodiscard]] bool applicable() const { return raw.has_value(); }
    [[nodiscard]] double clamped() const { return std::clamp(*raw, 0.0, kDistanceCeiling); }

    static BoundValue of(double v) { return {v, {}, ErrorKind::HypothesisFailed}; }
    static BoundValue not_applicable(std::string why, ErrorKind kind = ErrorKind::HypothesisFailed) {
        return {std::nullopt, std::move(why), kind};
    }
};

namespace formula {

/// 2 (1 - 2 Phi(-xi / 2)), the exact Gaussian distance for a given xi^2.
inline double gaussian_term(double xi_sq) {
    if (std::isinf(xi_sq)) {
        return kDistanceCeiling;
    }
    return 2.0 * (1.0 - 2.0 * normal_cdf(-0.5 * std::sqrt(xi_sq)));
}

inline double hellinger_bound(double xi_sq, double horizon, double h2) {
    const double exponent = -xi_sq / 8.0 - 0.5 * horizon * h2;
    return std::sqrt(-8.0 * std::expm1(exponent));
}

inline double sinh_bound(double xi_sq, double horizon, double l1) {
    return 2.0 * std::sinh(horizon * l1) + (xi_sq > 0.0 ? gaussian_term(xi_sq) : 0.0);
}

inline double sqrt_bound(double horizon, double l1) { return 2.0 * std::sqrt(horizon * l1); }

}  // namespace formula

namespace detail {

// Shared hypothesis gate for the two theorem bounds. Returns a reason when
// the drift / volatility part of the hypotheses fails.
inline std::optional<std::string> drift_part_failure(const Ingredients& ing) {
    if (ing.sigma_mismatch) {
        return reason::kSigmaMismatch;
    }
    if (!ing.eta) {
        return reason::kEtaDivergent;
    }
    if (ing.regime == VolRegime::Zero && !(ing.drift && ing.drift->ok)) {
        return reason::kDriftMismatch;
    }
    return std::nullopt;
}

}  // namespace detail

inline BoundValue evaluate_thm1(const Ingredients& ing) {
    if (auto why = detail::drift_part_failure(ing)) {
        return BoundValue::not_applicable(*why);
    }
    if (!ing.abs_continuous) {
        return BoundValue::not_applicable(reason::kNotAbsCont);
    }
    if (std::isinf(*ing.hellinger_sq_nu)) {
        return BoundValue::not_applicable(reason::kH2Infinite);
    }
    const double xi2 = ing.regime == VolRegime::Positive ? *ing.xi_sq : 0.0;
    return BoundValue::of(formula::hellinger_bound(xi2, ing.horizon, *ing.hellinger_sq_nu));
}

inline BoundValue evaluate_thm2(const Ingredients& ing) {
    if (auto why = detail::drift_part_failure(ing)) {
        return BoundValue::not_applicable(*why);
    }
    if (!ing.abs_continuous) {
        return BoundValue::not_applicable(reason::kNotAbsCont);
    }
    if (std::isinf(*ing.l1_nu)) {
        return BoundValue::not_applicable(reason::kL1Infinite);
    }
    const double xi2 = ing.regime == VolRegime::Positive ? *ing.xi_sq : 0.0;
    return BoundValue::of(formula::sinh_bound(xi2, ing.horizon, *ing.l1_nu));
}

inline BoundValue evaluate_simple_sqrt(const Ingredients& ing) {
    if (ing.sigma_mismatch) {
        return BoundValue::not_applicable(reason::kSigmaMismatch);
    }
    if (ing.regime != VolRegime::Zero) {
        return BoundValue::not_applicable(reason::kNeedsZeroSigma);
    }
    if (auto why = detail::drift_part_failure(ing)) {
        return BoundValue::not_applicable(*why);
    }
    if (!ing.abs_continuous) {
        return BoundValue::not_applicable(reason::kNotAbsCont);
    }
    if (std::isinf(*ing.l1_nu)) {
        return BoundValue::not_applicable(reason::kL1Infinite);
    }
    return BoundValue::of(formula::sqrt_bound(ing.horizon, *ing.l1_nu));
}

inline BoundValue evaluate_gaussian_exact(const Ingredients& ing) {
    if (ing.sigma_mismatch) {
        return BoundValue::not_applicable(reason::kSigmaMismatch);
    }
    if (!ing.gaussian_case) {
        return BoundValue::not_applicable(reason::kNotGaussian, ErrorKind::NotGaussianCase);
    }
    if (ing.regime != VolRegime::Positive) {
        return BoundValue::not_applicable(reason::kZeroVol, ErrorKind::ZeroVolatility);
    }
    return BoundValue::of(formula::gaussian_term(*ing.xi_sq));
}

namespace detail {

inline double unwrap(const BoundValue& b) {
    if (!b.applicable()) {
        fail(b.failure, b.reason);
    }
    return *b.raw;
}

}  // namespace detail

/// Exact L1 distance when neither process jumps (sigma^2 > 0).
inline double gaussian_tv_exact(const ProblemSpec& spec) {
    return detail::unwrap(evaluate_gaussian_exact(compute_ingredients(spec)));
}

/// Hellinger-route bound (raw, at most sqrt(8)).
inline double bound_thm1(const ProblemSpec& spec) {
    return detail::unwrap(evaluate_thm1(compute_ingredients(spec)));
}

/// Sinh-route bound (raw, may exceed 2).
inline double bound_thm2(const ProblemSpec& spec) {
    return detail::unwrap(evaluate_thm2(compute_ingredients(spec)));
}

inline double bound_simple_sqrt(const ProblemSpec& spec) {
    return detail::unwrap(evaluate_simple_sqrt(compute_ingredients(spec)));
}

struct BoundReport {
    Ingredients ingredients;
    BoundValue thm1;
    BoundValue thm2;
    BoundValue simple_sqrt;
    BoundValue gaussian_exact;
    double best = kDistanceCeiling;
    std::string best_source = "trivial";

    [[nodiscard]] bool any_applicable() const {
        return thm1.applicable() || thm2.applicable() || simple_sqrt.applicable() ||
               gaussian_exact.applicable();
    }
};

inline BoundReport make_report(Ingredients ing) {
    BoundReport rep;
    rep.thm1 = evaluate_thm1(ing);
    rep.thm2 = evaluate_thm2(ing);
    rep.simple_sqrt = evaluate_simple_sqrt(ing);
    rep.gaussian_exact = evaluate_gaussian_exact(ing);
    rep.ingredients = std::move(ing);
    if (rep.ingredients.sigma_mismatch) {
        rep.best = kDistanceCeiling;
        rep.best_source = reason::kSigmaMismatch;
        return rep;
    }
    const std::pair<const char*, const BoundValue*> candidates[] = {
        {"gaussian_exact", &rep.gaussian_exact},
        {"thm1", &rep.thm1},
        {"thm2", &rep.thm2},
        {"simple_sqrt", &rep.simple_sqrt},
    };
    for (const auto& [name, b] : candidates) {
        if (b->applicable() && b->clamped() < rep.best) {
            rep.best = b->clamped();
            rep.best_source = name;
        }
    }
    return rep;
}

inline BoundReport compute_report(const ProblemSpec& spec) {
    return make_report(compute_ingredients(spec));
}

}  // namespace addgap
