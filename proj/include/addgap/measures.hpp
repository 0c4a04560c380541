// SPDX-License-Identifier: Apache-2.0
//
// Levy measures on R\{0} given by Lebesgue densities, and the measure-level
// functionals used by the distance bounds: the small-jump drift gamma, the
// L1 distance, the Hellinger-type integral H^2 and the integrability checks.
#pragma once

#include "addgap/error.hpp"
#include "addgap/piecewise_density.hpp"
#include "addgap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace addgap {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Jump size densities
// ---------------------------------------------------------------------------

struct UniformJumps {
    double a;
    double b;
    friend bool operator==(const UniformJumps&, const UniformJumps&) = default;
};

struct ExponentialJumps {
    double rate;
    friend bool operator==(const ExponentialJumps&, const ExponentialJumps&) = default;
};

struct NormalJumps {
    double mean;
    double variance;
    friend bool operator==(const NormalJumps&, const NormalJumps&) = default;
};

struct TabulatedJumps {
    PiecewiseDensity table;  // normalized to unit mass
    friend bool operator==(const TabulatedJumps&, const TabulatedJumps&) = default;
};

/// Probability density of a single jump size.
class JumpDensity {
public:
    using Family = std::variant<UniformJumps, ExponentialJumps, NormalJumps, TabulatedJumps>;

    static JumpDensity uniform(double a, double b) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
            fail(ErrorKind::InvalidArgument, "uniform jump density needs finite a < b");
        }
        return JumpDensity(UniformJumps{a, b});
    }

    static JumpDensity exponential(double rate) {
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            fail(ErrorKind::InvalidArgument, "exponential jump density needs rate > 0");
        }
        return JumpDensity(ExponentialJumps{rate});
    }

    static JumpDensity normal(double mean, double variance) {
        if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
            fail(ErrorKind::InvalidArgument, "normal jump density needs variance > 0");
        }
        return JumpDensity(NormalJumps{mean, variance});
    }

    /// Values are rescaled so the table integrates to one.
    static JumpDensity tabulated(std::vector<double> grid, std::vector<double> values) {
        PiecewiseDensity table(std::move(grid), std::move(values));
        if (!(table.mass() > 0.0)) {
            fail(ErrorKind::InvalidArgument, "tabulated jump density has zero mass");
        }
        return JumpDensity(TabulatedJumps{table.scaled(1.0 / table.mass())});
    }

    [[nodiscard]] double operator()(double y) const {
        return std::visit(
            [y](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, UniformJumps>) {
                    return (y >= f.a && y <= f.b) ? 1.0 / (f.b - f.a) : 0.0;
                } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                    return y > 0.0 ? f.rate * std::exp(-f.rate * y) : 0.0;
                } else if constexpr (std::is_same_v<T, NormalJumps>) {
                    const double z = (y - f.mean);
                    return std::exp(-0.5 * z * z / f.variance) /
                           std::sqrt(2.0 * std::numbers::pi * f.variance);
                } else {
                    return f.table(y);
                }
            },
            family_);
    }

    /// Points where the density has kinks or jumps.
    [[nodiscard]] std::vector<double> breakpoints() const {
        return std::visit(
            [](const auto& f) -> std::vector<double> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, UniformJumps>) {
                    return {f.a, f.b};
                } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                    return {0.0};
                } else if constexpr (std::is_same_v<T, NormalJumps>) {
                    return {f.mean};
                } else {
                    return f.table.knots();
                }
            },
            family_);
    }

    /// Smallest interval [lo, hi] outside of which the density is negligible
    /// (below e^-40 relative); infinite tails are cut accordingly.
    [[nodiscard]] std::pair<double, double> effective_support() const {
        return std::visit(
            [](const auto& f) -> std::pair<double, double> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, UniformJumps>) {
                    return {f.a, f.b};
                } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                    return {0.0, 50.0 / f.rate};
                } else if constexpr (std::is_same_v<T, NormalJumps>) {
                    const double sd = std::sqrt(f.variance);
                    return {f.mean - 12.0 * sd, f.mean + 12.0 * sd};
                } else {
                    return {f.table.knots().front(), f.table.knots().back()};
                }
            },
            family_);
    }

    /// True when the support is bounded.
    [[nodiscard]] bool bounded_support() const {
        return std::holds_alternative<UniformJumps>(family_) ||
               std::holds_alternative<TabulatedJumps>(family_);
    }

    [[nodiscard]] const Family& family() const { return family_; }

    friend bool operator==(const JumpDensity&, const JumpDensity&) = default;

private:
    explicit JumpDensity(Family f) : family_(std::move(f)) {}
    Family family_;
};

// ---------------------------------------------------------------------------
// Levy measures
// ---------------------------------------------------------------------------

struct ZeroMeasure {
    friend bool operator==(const ZeroMeasure&, const ZeroMeasure&) = default;
};

struct CompoundPoisson {
    double intensity;
    JumpDensity jumps;
    friend bool operator==(const CompoundPoisson&, const CompoundPoisson&) = default;
};

/// Density C_-|y|^(-1-alpha) e^(-lambda_-|y|) on y < 0 and
/// C_+ y^(-1-alpha) e^(-lambda_+ y) on y > 0.
struct TemperedStable {
    double c_minus;
    double c_plus;
    double lambda_minus;
    double lambda_plus;
    double alpha;
    friend bool operator==(const TemperedStable&, const TemperedStable&) = default;
};

/// One side of a tabulated Levy measure, indexed by |y|. Below the innermost
/// knot the innermost cell's power law is continued down to the origin.
struct TabulatedSide {
    std::optional<PiecewiseDensity> table;  // over |y|
    double inner_exponent = 0.0;
    bool extrapolates = false;

    [[nodiscard]] double density(double abs_y) const {
        if (!table) {
            return 0.0;
        }
        const auto& k = table->knots();
        if (abs_y < k.front()) {
            return extrapolates ? table->values().front() * std::pow(abs_y / k.front(), inner_exponent)
                                : 0.0;
        }
        return (*table)(abs_y);
    }

    /// Mass of the extrapolated zone (0, innermost knot).
    [[nodiscard]] double inner_mass() const {
        if (!table || !extrapolates) {
            return 0.0;
        }
        const double q = inner_exponent + 1.0;
        if (q <= 0.0) {
            return kInfinity;
        }
        return table->values().front() * table->knots().front() / q;
    }

    friend bool operator==(const TabulatedSide&, const TabulatedSide&) = default;
};

struct TabulatedMeasure {
    std::vector<double> grid;
    std::vector<double> values;
    TabulatedSide negative;
    TabulatedSide positive;
    friend bool operator==(const TabulatedMeasure& a, const TabulatedMeasure& b) {
        return a.grid == b.grid && a.values == b.values;
    }
};

class LevyMeasure {
public:
    using Variant = std::variant<ZeroMeasure, CompoundPoisson, TemperedStable, TabulatedMeasure>;

    LevyMeasure() : v_(ZeroMeasure{}) {}

    static LevyMeasure zero() { return LevyMeasure(ZeroMeasure{}); }

    static LevyMeasure compound_poisson(double intensity, JumpDensity jumps) {
        if (!(intensity > 0.0) || !std::isfinite(intensity)) {
            fail(ErrorKind::InvalidArgument, "compound Poisson intensity must be > 0");
        }
        return LevyMeasure(CompoundPoisson{intensity, std::move(jumps)});
    }

    static LevyMeasure tempered_stable(double c_minus, double c_plus, double lambda_minus,
                                       double lambda_plus, double alpha) {
        const bool ok = c_minus > 0.0 && c_plus > 0.0 && lambda_minus > 0.0 && lambda_plus > 0.0 &&
                        alpha < 2.0 && std::isfinite(c_minus) && std::isfinite(c_plus) &&
                        std::isfinite(lambda_minus) && std::isfinite(lambda_plus) &&
                        std::isfinite(alpha);
        if (!ok) {
            fail(ErrorKind::InvalidArgument,
                 "tempered stable needs C_+-, lambda_+- > 0 and alpha < 2");
        }
        return LevyMeasure(TemperedStable{c_minus, c_plus, lambda_minus, lambda_plus, alpha});
    }

    /// grid: sorted nonzero knots (either sign); values: density at each knot.
    static LevyMeasure tabulated(std::vector<double> grid, std::vector<double> values) {
        if (grid.size() != values.size() || grid.empty()) {
            fail(ErrorKind::InvalidArgument, "tabulated measure needs one value per grid point");
        }
        std::vector<double> neg_k, neg_v, pos_k, pos_v;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] == 0.0 || !std::isfinite(grid[i])) {
                fail(ErrorKind::InvalidArgument, "tabulated measure grid must exclude 0");
            }
            if (i > 0 && !(grid[i] > grid[i - 1])) {
                fail(ErrorKind::InvalidArgument, "tabulated measure grid must be strictly increasing");
            }
            if (grid[i] < 0.0) {
                neg_k.push_back(-grid[i]);
                neg_v.push_back(values[i]);
            } else {
                pos_k.push_back(grid[i]);
                pos_v.push_back(values[i]);
            }
        }
        std::reverse(neg_k.begin(), neg_k.end());
        std::reverse(neg_v.begin(), neg_v.end());
        auto make_side = [](std::vector<double> k, std::vector<double> v) {
            TabulatedSide side;
            if (k.empty()) {
                return side;
            }
            if (k.size() == 1) {
                fail(ErrorKind::InvalidArgument,
                     "each populated side of a tabulated measure needs at least two knots");
            }
            side.table = PiecewiseDensity(std::move(k), std::move(v));
            side.extrapolates = side.table->is_power_cell(0);
            side.inner_exponent = side.extrapolates ? side.table->cell_exponent(0) : 0.0;
            return side;
        };
        TabulatedMeasure m;
        m.negative = make_side(std::move(neg_k), std::move(neg_v));
        m.positive = make_side(std::move(pos_k), std::move(pos_v));
        m.grid = std::move(grid);
        m.values = std::move(values);
        return LevyMeasure(std::move(m));
    }

    [[nodiscard]] const Variant& variant() const { return v_; }

    template <class T>
    [[nodiscard]] const T* as() const {
        return std::get_if<T>(&v_);
    }

    [[nodiscard]] bool is_zero() const { return std::holds_alternative<ZeroMeasure>(v_); }

    friend bool operator==(const LevyMeasure&, const LevyMeasure&) = default;

private:
    explicit LevyMeasure(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline double density_unchecked(const LevyMeasure& nu, double y) {
    return std::visit(
        [y](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ZeroMeasure>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return m.intensity * m.jumps(y);
            } else if constexpr (std::is_same_v<T, TemperedStable>) {
                const double ay = std::abs(y);
                const double c = y < 0.0 ? m.c_minus : m.c_plus;
                const double lam = y < 0.0 ? m.lambda_minus : m.lambda_plus;
                return c * std::exp(-lam * ay - (1.0 + m.alpha) * std::log(ay));
            } else {
                return y < 0.0 ? m.negative.density(-y) : m.positive.density(y);
            }
        },
        nu.variant());
}

// Same-shape tempered stable sides differ only through the tempering rate;
// returns {c, alpha, lambda1, lambda2} for the side of y when that holds.
struct TemperedSidePair {
    double c;
    double alpha;
    double lambda1;
    double lambda2;
};

inline std::optional<TemperedSidePair> tempered_side_pair(const LevyMeasure& nu1,
                                                          const LevyMeasure& nu2, double y) {
    const auto* a = nu1.as<TemperedStable>();
    const auto* b = nu2.as<TemperedStable>();
    if (a == nullptr || b == nullptr || a->alpha != b->alpha) {
        return std::nullopt;
    }
    if (y < 0.0 && a->c_minus == b->c_minus) {
        return TemperedSidePair{a->c_minus, a->alpha, a->lambda_minus, b->lambda_minus};
    }
    if (y > 0.0 && a->c_plus == b->c_plus) {
        return TemperedSidePair{a->c_plus, a->alpha, a->lambda_plus, b->lambda_plus};
    }
    return std::nullopt;
}

}  // namespace detail

/// Lebesgue density of nu at y != 0.
inline double density_at(const LevyMeasure& nu, double y) {
    if (y == 0.0) {
        fail(ErrorKind::EvaluationAtZero, "Levy measure density is undefined at 0");
    }
    return detail::density_unchecked(nu, y);
}

/// d1(y) - d2(y) without catastrophic cancellation for same-shape tempered
/// stable pairs near the origin.
inline double density_difference(const LevyMeasure& nu1, const LevyMeasure& nu2, double y) {
    if (auto p = detail::tempered_side_pair(nu1, nu2, y)) {
        // factor out the slower exponential so expm1 never overflows
        const double ay = std::abs(y);
        const double slow = std::min(p->lambda1, p->lambda2);
        const double sign = p->lambda1 >= p->lambda2 ? 1.0 : -1.0;
        const double base = p->c * std::exp(-slow * ay - (1.0 + p->alpha) * std::log(ay));
        return sign * base * std::expm1(-std::abs(p->lambda1 - p->lambda2) * ay);
    }
    return density_at(nu1, y) - density_at(nu2, y);
}

/// sqrt(d1(y)) - sqrt(d2(y)), cancellation-safe as above.
inline double sqrt_density_difference(const LevyMeasure& nu1, const LevyMeasure& nu2, double y) {
    if (auto p = detail::tempered_side_pair(nu1, nu2, y)) {
        const double ay = std::abs(y);
        const double slow = std::min(p->lambda1, p->lambda2);
        const double sign = p->lambda1 >= p->lambda2 ? 1.0 : -1.0;
        const double base =
            std::sqrt(p->c) * std::exp(-0.5 * slow * ay - 0.5 * (1.0 + p->alpha) * std::log(ay));
        return sign * base * std::expm1(-0.5 * std::abs(p->lambda1 - p->lambda2) * ay);
    }
    return std::sqrt(density_at(nu1, y)) - std::sqrt(density_at(nu2, y));
}

// ---------------------------------------------------------------------------
// Structural helpers
// ---------------------------------------------------------------------------

/// Knots and support edges of the density, excluding 0.
inline std::vector<double> breakpoints(const LevyMeasure& nu) {
    std::vector<double> out = std::visit(
        [](const auto& m) -> std::vector<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return m.jumps.breakpoints();
            } else if constexpr (std::is_same_v<T, TabulatedMeasure>) {
                return m.grid;
            } else {
                return {};
            }
        },
        nu.variant());
    std::erase(out, 0.0);
    return out;
}

/// Whether the density may blow up at the origin.
inline bool may_be_singular_at_zero(const LevyMeasure& nu) {
    if (nu.as<TemperedStable>() != nullptr) {
        return true;
    }
    if (const auto* t = nu.as<TabulatedMeasure>()) {
        return t->negative.extrapolates || t->positive.extrapolates;
    }
    return false;
}

/// Largest |y| carrying non-negligible mass on the negative / positive side,
/// 0 when a side is empty. Unbounded tails are cut where the density has
/// decayed by e^-50.
struct SupportExtent {
    double negative;
    double positive;
    bool bounded;
};

inline SupportExtent support_extent(const LevyMeasure& nu) {
    return std::visit(
        [](const auto& m) -> SupportExtent {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ZeroMeasure>) {
                return {0.0, 0.0, true};
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                const auto [lo, hi] = m.jumps.effective_support();
                return {std::max(0.0, -lo), std::max(0.0, hi), m.jumps.bounded_support()};
            } else if constexpr (std::is_same_v<T, TemperedStable>) {
                return {50.0 / m.lambda_minus, 50.0 / m.lambda_plus, false};
            } else {
                const double neg = m.negative.table ? m.negative.table->knots().back() : 0.0;
                const double pos = m.positive.table ? m.positive.table->knots().back() : 0.0;
                return {neg, pos, true};
            }
        },
        nu.variant());
}

namespace detail {

inline std::vector<double> merged_breakpoints(const LevyMeasure& a, const LevyMeasure& b,
                                              std::initializer_list<double> extra = {}) {
    std::vector<double> out = breakpoints(a);
    const auto more = breakpoints(b);
    out.insert(out.end(), more.begin(), more.end());
    out.insert(out.end(), extra.begin(), extra.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Integrates g over R\{0}, or over |y| > epsilon when epsilon > 0.
template <class G>
quad::IntegrationResult integrate_line(const G& g, std::vector<double> bps, bool singular,
                                       double epsilon = 0.0, double lower = -kInfinity,
                                       double upper = kInfinity) {
    quad::IntegrationOptions opts;
    if (epsilon <= 0.0) {
        opts.breakpoints = std::move(bps);
        opts.singular_at_zero = singular;
        return quad::integrate(g, lower, upper, opts);
    }
    // |y| > epsilon: two regular pieces, with dyadic cuts between epsilon and 1
    // to help the bisection near a steep power law.
    auto side_cuts = [&bps, epsilon](double sign) {
        std::vector<double> out;
        for (double b : bps) {
            if (sign * b > epsilon) {
                out.push_back(b);
            }
        }
        for (double c = 2.0 * epsilon; c < 1.0; c *= 2.0) {
            out.push_back(sign * c);
        }
        return out;
    };
    quad::IntegrationResult total{0.0, 0.0, false};
    if (lower < -epsilon) {
        opts.breakpoints = side_cuts(-1.0);
        const auto r = quad::integrate(g, lower, std::min(-epsilon, upper), opts);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
    }
    if (upper > epsilon) {
        opts.breakpoints = side_cuts(1.0);
        const auto r = quad::integrate(g, std::max(epsilon, lower), upper, opts);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
    }
    return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

/// nu(R), or infinity for infinite-activity measures.
inline double total_mass(const LevyMeasure& nu) {
    return std::visit(
        [&nu](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ZeroMeasure>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return m.intensity;
            } else if constexpr (std::is_same_v<T, TemperedStable>) {
                if (m.alpha >= 0.0) {
                    return kInfinity;
                }
                const auto r = detail::integrate_line(
                    [&nu](double y) { return y == 0.0 ? 0.0 : density_at(nu, y); }, {}, true);
                return r.diverged ? kInfinity : r.value;
            } else {
                const double inner = m.negative.inner_mass() + m.positive.inner_mass();
                if (std::isinf(inner)) {
                    return kInfinity;
                }
                double tables = 0.0;
                if (m.negative.table) {
                    tables += m.negative.table->mass();
                }
                if (m.positive.table) {
                    tables += m.positive.table->mass();
                }
                return inner + tables;
            }
        },
        nu.variant());
}

/// Mass of nu restricted to |y| > epsilon.
inline double restricted_mass(const LevyMeasure& nu, double epsilon) {
    if (epsilon <= 0.0) {
        return total_mass(nu);
    }
    if (nu.is_zero()) {
        return 0.0;
    }
    return detail::integrate_line([&nu](double y) { return density_at(nu, y); }, breakpoints(nu),
                                  false, epsilon)
        .value;
}

/// gamma^nu: integral of y over |y| <= 1.
inline double gamma_nu(const LevyMeasure& nu) {
    if (nu.is_zero()) {
        return 0.0;
    }
    auto bps = breakpoints(nu);
    const auto r = detail::integrate_line(
        [&nu](double y) { return y == 0.0 ? 0.0 : y * density_at(nu, y); }, std::move(bps),
        may_be_singular_at_zero(nu), 0.0, -1.0, 1.0);
    if (r.diverged) {
        fail(ErrorKind::DivergentIntegral, "small-jump first moment of the Levy measure diverges");
    }
    return r.value;
}

/// Integral of y over epsilon < |y| <= 1 (the truncated compensator drift).
inline double truncated_gamma(const LevyMeasure& nu, double epsilon) {
    if (epsilon <= 0.0) {
        return gamma_nu(nu);
    }
    if (nu.is_zero() || epsilon >= 1.0) {
        return 0.0;
    }
    return detail::integrate_line([&nu](double y) { return y * density_at(nu, y); },
                                  breakpoints(nu), false, epsilon, -1.0, 1.0)
        .value;
}

struct AbsContinuityDiagnostic {
    bool ok = true;
    std::vector<double> violations;  // up to 16 offending probe points
};

/// Probes density1 > 0 => density2 > 0 on a log grid in |y| from 1e-8 to
/// max(support bound, 100) on each side, plus every knot of either measure.
inline AbsContinuityDiagnostic check_abs_continuity(const LevyMeasure& nu1, const LevyMeasure& nu2) {
    constexpr std::size_t kProbes = 4096;
    constexpr double kNegligibleDensity = 1e-250;
    constexpr std::size_t kMaxReported = 16;
    const auto e1 = support_extent(nu1);
    const auto e2 = support_extent(nu2);
    std::vector<double> probes = detail::merged_breakpoints(nu1, nu2);
    auto add_side = [&probes](double extent, double sign) {
        const double hi = std::max(extent, 100.0);
        const double lo = 1e-8;
        const double step = std::log(hi / lo) / static_cast<double>(kProbes - 1);
        for (std::size_t i = 0; i < kProbes; ++i) {
            probes.push_back(sign * lo * std::exp(step * static_cast<double>(i)));
        }
    };
    const bool bounded = e1.bounded && e2.bounded;
    add_side(bounded ? std::max(e1.negative, e2.negative) : 0.0, -1.0);
    add_side(bounded ? std::max(e1.positive, e2.positive) : 0.0, 1.0);

    AbsContinuityDiagnostic out;
    for (double y : probes) {
        if (y == 0.0) {
            continue;
        }
        // Far tails of two smooth densities can underflow at different
        // points; a first density this small carries no mass worth flagging.
        if (density_at(nu1, y) > kNegligibleDensity && !(density_at(nu2, y) > 0.0)) {
            out.ok = false;
            if (out.violations.size() < kMaxReported) {
                out.violations.push_back(y);
            }
        }
    }
    return out;
}

namespace detail {

inline void require_abs_continuity(const LevyMeasure& nu1, const LevyMeasure& nu2) {
    const auto diag = check_abs_continuity(nu1, nu2);
    if (!diag.ok) {
        std::string msg = "nu1 is not absolutely continuous with respect to nu2; e.g. at y = " +
                          std::to_string(diag.violations.front());
        fail(ErrorKind::NotAbsolutelyContinuous, msg);
    }
}

}  // namespace detail

/// L1(nu1, nu2) = integral of |d1 - d2|; infinity when divergent.
inline double l1_distance(const LevyMeasure& nu1, const LevyMeasure& nu2) {
    detail::require_abs_continuity(nu1, nu2);
    if (nu1 == nu2) {
        return 0.0;
    }
    const auto r = detail::integrate_line(
        [&](double y) { return y == 0.0 ? 0.0 : std::abs(density_difference(nu1, nu2, y)); },
        detail::merged_breakpoints(nu1, nu2),
        may_be_singular_at_zero(nu1) || may_be_singular_at_zero(nu2));
    return r.diverged ? kInfinity : r.value;
}

/// H^2(nu1, nu2) = integral of (sqrt(d1) - sqrt(d2))^2; infinity when divergent.
inline double hellinger_sq(const LevyMeasure& nu1, const LevyMeasure& nu2) {
    detail::require_abs_continuity(nu1, nu2);
    if (nu1 == nu2) {
        return 0.0;
    }
    const auto r = detail::integrate_line(
        [&](double y) {
            if (y == 0.0) {
                return 0.0;
            }
            const double d = sqrt_density_difference(nu1, nu2, y);
            return d * d;
        },
        detail::merged_breakpoints(nu1, nu2),
        may_be_singular_at_zero(nu1) || may_be_singular_at_zero(nu2));
    return r.diverged ? kInfinity : r.value;
}

/// Compensators of the ratio split over |y| > epsilon:
/// plus = integral of (d1 - d2)^+ and minus = -integral of (d1 - d2)^-.
/// plus - minus is the (restricted) L1 distance, plus + minus the restricted
/// mass difference.
struct RatioCompensators {
    double plus;
    double minus;
};

inline RatioCompensators ratio_compensators(const LevyMeasure& nu1, const LevyMeasure& nu2,
                                            double epsilon) {
    if (nu1 == nu2) {
        return {0.0, 0.0};
    }
    const auto* cp1 = nu1.as<CompoundPoisson>();
    const auto* cp2 = nu2.as<CompoundPoisson>();
    if (epsilon <= 0.0 && cp1 != nullptr && cp2 != nullptr && cp1->jumps == cp2->jumps) {
        const double diff = cp1->intensity - cp2->intensity;
        return {std::max(diff, 0.0), std::min(diff, 0.0)};
    }
    const bool singular =
        epsilon <= 0.0 && (may_be_singular_at_zero(nu1) || may_be_singular_at_zero(nu2));
    const auto bps = detail::merged_breakpoints(nu1, nu2);
    const auto plus = detail::integrate_line(
        [&](double y) { return y == 0.0 ? 0.0 : std::max(density_difference(nu1, nu2, y), 0.0); },
        bps, singular, epsilon);
    if (plus.diverged) {
        fail(ErrorKind::DivergentIntegral, "positive part of nu1 - nu2 has infinite mass");
    }
    const double m1 = restricted_mass(nu1, epsilon);
    const double m2 = restricted_mass(nu2, epsilon);
    if (std::isfinite(m1) && std::isfinite(m2) && epsilon <= 0.0) {
        // The difference can round to a tiny positive value when nu1 >= nu2.
        return {plus.value, std::min((m1 - m2) - plus.value, 0.0)};
    }
    const auto minus = detail::integrate_line(
        [&](double y) { return y == 0.0 ? 0.0 : std::min(density_difference(nu1, nu2, y), 0.0); },
        bps, singular, epsilon);
    if (minus.diverged) {
        fail(ErrorKind::DivergentIntegral, "negative part of nu1 - nu2 has infinite mass");
    }
    return {plus.value, minus.value};
}

struct LevyDiagnostic {
    bool ok = false;
    double value = 0.0;  // integral of min(y^2, 1); partial sum when divergent
};

/// Checks the Levy integrability condition: integral of (y^2 ^ 1) finite.
inline LevyDiagnostic validate_levy(const LevyMeasure& nu) {
    if (nu.is_zero()) {
        return {true, 0.0};
    }
    auto bps = breakpoints(nu);
    bps.push_back(-1.0);
    bps.push_back(1.0);
    const auto r = detail::integrate_line(
        [&nu](double y) { return y == 0.0 ? 0.0 : std::min(y * y, 1.0) * density_at(nu, y); },
        std::move(bps), may_be_singular_at_zero(nu));
    return {!r.diverged, r.value};
}

/// Integral of y^2 over 0 < |y| <= epsilon (variance of the dropped small jumps).
inline double small_jump_second_moment(const LevyMeasure& nu, double epsilon) {
    if (epsilon <= 0.0 || nu.is_zero()) {
        return 0.0;
    }
    const auto r = detail::integrate_line(
        [&nu](double y) { return y == 0.0 ? 0.0 : y * y * density_at(nu, y); }, breakpoints(nu),
        may_be_singular_at_zero(nu), 0.0, -epsilon, epsilon);
    if (r.diverged) {
        fail(ErrorKind::DivergentIntegral, "small-jump second moment diverges");
    }
    return r.value;
}

}  // namespace addgap
