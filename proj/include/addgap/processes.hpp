// SPDX-License-Identifier: Apache-2.0
//
// Local characteristics (drift f, squared volatility sigma^2, Levy measure nu)
// of an additive process, the paired problem and its scalar ingredients.
#pragma once

#include "addgap/error.hpp"
#include "addgap/measures.hpp"
#include "addgap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <variant>
#include <vector>

namespace addgap {

inline constexpr std::size_t kTimeProbePoints = 2049;
inline constexpr double kTimeProbeTol = 1e-9;
inline constexpr double kVolatilityFloor = 1e-30;

struct ConstantFn {
    double c;
    friend bool operator==(const ConstantFn&, const ConstantFn&) = default;
};

/// sum_k coeffs[k] * t^k
struct PolynomialFn {
    std::vector<double> coeffs;
    friend bool operator==(const PolynomialFn&, const PolynomialFn&) = default;
};

/// values[i] on [breaks[i-1], breaks[i]) with breaks[-1] = -inf, breaks[n] = +inf.
struct PiecewiseConstantFn {
    std::vector<double> breaks;
    std::vector<double> values;
    friend bool operator==(const PiecewiseConstantFn&, const PiecewiseConstantFn&) = default;
};

class TimeFunction {
public:
    using Form = std::variant<ConstantFn, PolynomialFn, PiecewiseConstantFn>;

    TimeFunction() : form_(ConstantFn{0.0}) {}

    static TimeFunction constant(double c) {
        if (!std::isfinite(c)) {
            fail(ErrorKind::InvalidArgument, "constant time function must be finite");
        }
        return TimeFunction(ConstantFn{c});
    }

    static TimeFunction polynomial(std::vector<double> coeffs) {
        if (coeffs.empty()) {
            coeffs.push_back(0.0);
        }
        for (double c : coeffs) {
            if (!std::isfinite(c)) {
                fail(ErrorKind::InvalidArgument, "polynomial coefficients must be finite");
            }
        }
        return TimeFunction(PolynomialFn{std::move(coeffs)});
    }

    static TimeFunction piecewise_constant(std::vector<double> breaks, std::vector<double> values) {
        if (values.size() != breaks.size() + 1) {
            fail(ErrorKind::InvalidArgument,
                 "piecewise constant function needs exactly one more value than breaks");
        }
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            if (!std::isfinite(breaks[i]) || (i > 0 && !(breaks[i] > breaks[i - 1]))) {
                fail(ErrorKind::InvalidArgument, "breaks must be finite and strictly increasing");
            }
        }
        for (double v : values) {
            if (!std::isfinite(v)) {
                fail(ErrorKind::InvalidArgument, "piecewise constant values must be finite");
            }
        }
        return TimeFunction(PiecewiseConstantFn{std::move(breaks), std::move(values)});
    }

    [[nodiscard]] double operator()(double t) const {
        return std::visit(
            [t](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ConstantFn>) {
                    return f.c;
                } else if constexpr (std::is_same_v<T, PolynomialFn>) {
                    double acc = 0.0;
                    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) {
                        acc = acc * t + *it;
                    }
                    return acc;
                } else {
                    const auto it = std::upper_bound(f.breaks.begin(), f.breaks.end(), t);
                    return f.values[static_cast<std::size_t>(it - f.breaks.begin())];
                }
            },
            form_);
    }

    /// Exact integral over [a, b].
    [[nodiscard]] double integral(double a, double b) const {
        return std::visit(
            [a, b](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ConstantFn>) {
                    return f.c * (b - a);
                } else if constexpr (std::is_same_v<T, PolynomialFn>) {
                    double pa = 0.0;
                    double pb = 0.0;
                    for (std::size_t k = f.coeffs.size(); k-- > 0;) {
                        const double c = f.coeffs[k] / static_cast<double>(k + 1);
                        pa = pa * a + c;
                        pb = pb * b + c;
                    }
                    return pb * b - pa * a;
                } else {
                    double total = 0.0;
                    double lo = a;
                    for (std::size_t i = 0; i <= f.breaks.size() && lo < b; ++i) {
                        const double hi = i < f.breaks.size() ? std::min(f.breaks[i], b) : b;
                        if (hi > lo) {
                            total += f.values[i] * (hi - lo);
                            lo = hi;
                        }
                    }
                    return total;
                }
            },
            form_);
    }

    [[nodiscard]] std::vector<double> breakpoints() const {
        if (const auto* p = std::get_if<PiecewiseConstantFn>(&form_)) {
            return p->breaks;
        }
        return {};
    }

    [[nodiscard]] const Form& form() const { return form_; }

    friend bool operator==(const TimeFunction&, const TimeFunction&) = default;

private:
    explicit TimeFunction(Form f) : form_(std::move(f)) {}
    Form form_;
};

struct ProcessSpec {
    TimeFunction drift;
    TimeFunction vol_sq;
    LevyMeasure levy;
};

struct ProblemSpec {
    ProcessSpec p1;
    ProcessSpec p2;
    double horizon = 1.0;
};

/// Uniform probe grid of kTimeProbePoints points on [0, T].
inline std::vector<double> time_probe_grid(double horizon) {
    std::vector<double> grid(kTimeProbePoints);
    for (std::size_t i = 0; i < kTimeProbePoints; ++i) {
        grid[i] = horizon * static_cast<double>(i) / static_cast<double>(kTimeProbePoints - 1);
    }
    return grid;
}

enum class VolRegime { Positive, Zero };

/// Classifies sigma^2(.) on [0, T]; mixed zero / positive / negative profiles
/// are rejected.
inline VolRegime vol_regime(const TimeFunction& vol_sq, double horizon) {
    bool any_zero = false;
    bool any_positive = false;
    for (double t : time_probe_grid(horizon)) {
        const double v = vol_sq(t);
        if (v < 0.0) {
            fail(ErrorKind::InvalidArgument, "sigma^2 must be nonnegative on [0, T]");
        }
        (v == 0.0 ? any_zero : any_positive) = true;
    }
    if (any_zero && any_positive) {
        fail(ErrorKind::InvalidArgument,
             "sigma^2 must be strictly positive on [0, T] or identically zero");
    }
    return any_positive ? VolRegime::Positive : VolRegime::Zero;
}

inline void validate(const ProcessSpec& p, double horizon) {
    const auto diag = validate_levy(p.levy);
    if (!diag.ok) {
        fail(ErrorKind::InvalidArgument, "Levy measure violates the integrability of min(y^2, 1)");
    }
    vol_regime(p.vol_sq, horizon);
}

inline void validate(const ProblemSpec& spec) {
    if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
        fail(ErrorKind::InvalidArgument, "horizon T must be finite and > 0");
    }
    validate(spec.p1, spec.horizon);
    validate(spec.p2, spec.horizon);
}

/// Sup over the probe grid of |sigma1^2 - sigma2^2|.
inline double vol_sq_gap(const ProblemSpec& spec) {
    double gap = 0.0;
    for (double t : time_probe_grid(spec.horizon)) {
        gap = std::max(gap, std::abs(spec.p1.vol_sq(t) - spec.p2.vol_sq(t)));
    }
    return gap;
}

inline bool sigma_mismatch(const ProblemSpec& spec) { return vol_sq_gap(spec) > kTimeProbeTol; }

/// eta = integral over |y| <= 1 of y (nu1 - nu2)(dy).
///
/// Integrated as a single difference so that pairs whose individual small-jump
/// moments diverge but whose difference is integrable still yield eta.
inline double eta(const LevyMeasure& nu1, const LevyMeasure& nu2) {
    if (nu1 == nu2) {
        return 0.0;
    }
    auto bps = detail::merged_breakpoints(nu1, nu2);
    const auto r = detail::integrate_line(
        [&](double y) { return y == 0.0 ? 0.0 : y * density_difference(nu1, nu2, y); },
        std::move(bps), may_be_singular_at_zero(nu1) || may_be_singular_at_zero(nu2), 0.0, -1.0,
        1.0);
    if (r.diverged) {
        fail(ErrorKind::DivergentIntegral, "eta diverges: small-jump first moments differ by an infinite amount");
    }
    return r.value;
}

/// xi^2 = integral over [0, T] of (f1 - f2 - eta)^2 / sigma^2.
inline double xi_sq(const ProblemSpec& spec, double eta_value) {
    if (vol_regime(spec.p2.vol_sq, spec.horizon) == VolRegime::Zero) {
        fail(ErrorKind::ZeroVolatility, "xi^2 is undefined when sigma^2 is identically zero");
    }
    quad::IntegrationOptions opts;
    opts.breakpoints = spec.p1.drift.breakpoints();
    for (const auto* f : {&spec.p2.drift, &spec.p2.vol_sq}) {
        const auto b = f->breakpoints();
        opts.breakpoints.insert(opts.breakpoints.end(), b.begin(), b.end());
    }
    const auto r = quad::integrate(
        [&](double t) {
            const double s2 = spec.p2.vol_sq(t);
            if (s2 < kVolatilityFloor) {
                fail(ErrorKind::ZeroVolatility, "sigma^2 vanishes inside [0, T]");
            }
            const double gap = spec.p1.drift(t) - spec.p2.drift(t) - eta_value;
            return gap * gap / s2;
        },
        0.0, spec.horizon, opts);
    if (r.diverged) {
        fail(ErrorKind::DivergentIntegral, "xi^2 diverges");
    }
    return r.value;
}

inline double xi_sq(const ProblemSpec& spec) { return xi_sq(spec, eta(spec.p1.levy, spec.p2.levy)); }

struct DriftDiagnostic {
    bool ok = false;
    double sup_gap = 0.0;  // sup |f1 - f2 - eta| over the probe grid
};

/// For sigma^2 = 0: checks f1 - f2 == gamma^nu1 - gamma^nu2 on the probe grid.
inline DriftDiagnostic drift_match_check(const ProblemSpec& spec, double eta_value) {
    DriftDiagnostic out;
    for (double t : time_probe_grid(spec.horizon)) {
        out.sup_gap =
            std::max(out.sup_gap, std::abs(spec.p1.drift(t) - spec.p2.drift(t) - eta_value));
    }
    out.ok = out.sup_gap <= kTimeProbeTol;
    return out;
}

inline DriftDiagnostic drift_match_check(const ProblemSpec& spec) {
    return drift_match_check(spec, eta(spec.p1.levy, spec.p2.levy));
}

namespace detail {

// x - sin(x) without cancellation for small x.
inline double x_minus_sin(double x) {
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
    }
    return x - std::sin(x);
}

}  // namespace detail

/// E[exp(iuX_t)] from the Levy-Khintchine representation with truncation
/// function 1_{|y| <= 1}.
inline std::complex<double> char_function(const ProcessSpec& p, double u, double t) {
    if (u == 0.0) {
        return {1.0, 0.0};
    }
    const double drift = p.drift.integral(0.0, t);
    const double var = p.vol_sq.integral(0.0, t);
    double jump_re = 0.0;  // integral of 1 - cos(uy)
    double jump_im = 0.0;  // integral of uy 1_{|y|<=1} - sin(uy)
    if (!p.levy.is_zero() && t > 0.0) {
        auto bps = breakpoints(p.levy);
        bps.push_back(-1.0);
        bps.push_back(1.0);
        const bool singular = may_be_singular_at_zero(p.levy);
        const auto re = detail::integrate_line(
            [&](double y) {
                if (y == 0.0) {
                    return 0.0;
                }
                const double s = std::sin(0.5 * u * y);
                return 2.0 * s * s * density_at(p.levy, y);
            },
            bps, singular);
        const auto im = detail::integrate_line(
            [&](double y) {
                if (y == 0.0) {
                    return 0.0;
                }
                const double x = u * y;
                const double g = std::abs(y) <= 1.0 ? detail::x_minus_sin(x) : -std::sin(x);
                return g * density_at(p.levy, y);
            },
            bps, singular);
        if (re.diverged || im.diverged) {
            fail(ErrorKind::DivergentIntegral, "compensated jump integral diverges");
        }
        jump_re = re.value;
        jump_im = im.value;
    }
    const std::complex<double> exponent{-0.5 * u * u * var - t * jump_re, u * drift - t * jump_im};
    return std::exp(exponent);
}

}  // namespace addgap
