// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Gauss-Kronrod integration on finite and semi-infinite intervals.
//
// Regular pieces use a global bisection scheme with the 10/21-point
// Gauss-Kronrod pair. Semi-infinite pieces are mapped onto [0,1) with
// y = a + t/(1-t). When singular_at_zero is set, the interval is split at the
// origin and each side is swept by dyadic panels [s/2^(k+1), s/2^k] until the
// geometric tail is negligible or the panel width drops below 1e-30.
#pragma once

#include "addgap/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>
#include <sstream>
#include <vector>

namespace addgap::quad {

inline constexpr double kDefaultAbsTol = 1e-10;
inline constexpr double kDefaultRelTol = 1e-8;
inline constexpr double kDivergenceCap = 1e8;
inline constexpr double kMinPanelWidth = 1e-30;

struct IntegrationOptions {
    double abs_tol = kDefaultAbsTol;
    double rel_tol = kDefaultRelTol;
    bool singular_at_zero = false;
    // Interior points where the integrand has kinks or jumps.
    std::vector<double> breakpoints{};
    std::size_t max_subdivisions = 200000;
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    // When set, value holds the partial sum at which refinement stopped.
    bool diverged = false;
};

namespace detail {

// Neumaier compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + comp; }
};

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980804598, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class F>
double checked_eval(const F& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "integrand is not finite at x = " << x << " (value " << v << ")";
        fail(ErrorKind::NonFiniteIntegrand, os.str());
    }
    return v;
}

struct PanelEstimate {
    double value;
    double error;
};

// 21-point Kronrod estimate with the QUADPACK error heuristic.
template <class F>
PanelEstimate gk21(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked_eval(f, center);
    double resk = kWgk[10] * fc;
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{};
    std::array<double, 10> f2{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = checked_eval(f, center - dx);
        f2[j] = checked_eval(f, center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) {
            resg += kWg[j / 2] * sum;
        }
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    const double ah = std::abs(half);
    resk *= half;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    return {resk, err};
}

enum class Map { Finite, UpperInfinite, LowerInfinite };

struct Piece {
    double lo;  // in mapped coordinates
    double hi;
    Map map;
    double anchor;  // finite endpoint for semi-infinite maps
    double value;
    double error;

    bool operator<(const Piece& other) const { return error < other.error; }
};

template <class F>
double eval_mapped(const F& f, Map map, double anchor, double t) {
    switch (map) {
    case Map::Finite:
        return f(t);
    case Map::UpperInfinite: {
        const double u = 1.0 - t;
        return f(anchor + t / u) / (u * u);
    }
    case Map::LowerInfinite: {
        const double u = 1.0 - t;
        return f(anchor - t / u) / (u * u);
    }
    }
    return 0.0;
}

template <class F>
Piece make_piece(const F& f, double lo, double hi, Map map, double anchor) {
    auto g = [&](double t) { return eval_mapped(f, map, anchor, t); };
    const auto est = gk21(g, lo, hi);
    return {lo, hi, map, anchor, est.value, est.error};
}

struct Span {
    double lo;
    double hi;
};

// Global adaptive bisection over a set of regular spans. `extra_value`
// is added to the running total when evaluating the relative tolerance.
template <class F>
IntegrationResult adapt(const F& f, const std::vector<Span>& spans, double abs_tol,
                        double rel_tol, double extra_value, std::size_t budget) {
    std::vector<Piece> heap;
    auto push = [&heap](const Piece& p) {
        heap.push_back(p);
        std::push_heap(heap.begin(), heap.end());
    };
    for (const auto& s : spans) {
        if (std::isinf(s.hi) && std::isinf(s.lo)) {
            push(make_piece(f, 0.0, 1.0, Map::LowerInfinite, 0.0));
            push(make_piece(f, 0.0, 1.0, Map::UpperInfinite, 0.0));
        } else if (std::isinf(s.hi)) {
            push(make_piece(f, 0.0, 1.0, Map::UpperInfinite, s.lo));
        } else if (std::isinf(s.lo)) {
            push(make_piece(f, 0.0, 1.0, Map::LowerInfinite, s.hi));
        } else {
            push(make_piece(f, s.lo, s.hi, Map::Finite, 0.0));
        }
    }
    auto totals = [&heap]() {
        KahanSum v;
        KahanSum e;
        for (const auto& p : heap) {
            v.add(p.value);
            e.add(p.error);
        }
        return std::pair{v.value(), e.value()};
    };

    std::size_t used = heap.size();
    auto [value, error] = totals();
    while (!heap.empty()) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(value + extra_value));
        if (error <= tol) {
            break;
        }
        if (used >= budget) {
            std::ostringstream os;
            os.precision(6);
            os << "subdivision budget exhausted with error estimate " << error
               << " above tolerance " << tol;
            fail(ErrorKind::ToleranceNotMet, os.str());
        }
        const Piece worst = heap.front();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Interval cannot be split further in double precision.
            if (error <= 100.0 * tol) {
                break;
            }
            fail(ErrorKind::ToleranceNotMet, "interval collapsed before reaching tolerance");
        }
        std::pop_heap(heap.begin(), heap.end());
        heap.pop_back();
        const Piece left = make_piece(f, worst.lo, mid, worst.map, worst.anchor);
        const Piece right = make_piece(f, mid, worst.hi, worst.map, worst.anchor);
        value += (left.value + right.value) - worst.value;
        error += (left.error + right.error) - worst.error;
        push(left);
        push(right);
        ++used;
        if ((used & 63U) == 0) {
            std::tie(value, error) = totals();
        }
    }
    std::tie(value, error) = totals();
    return {value, error, false};
}

// Integrates over (0, s] when direction = +1, over [-s, 0) when direction = -1.
template <class F>
IntegrationResult sweep_toward_zero(const F& f, double s, int direction, double abs_tol,
                                    double rel_tol, std::size_t budget) {
    KahanSum sum;
    double error = 0.0;
    std::vector<double> contrib;
    double hi = s;
    constexpr double kRatioCeiling = 1.0 - 1e-9;

    auto tail_of = [&contrib]() -> std::pair<double, double> {
        // geometric tail from the last two contributions; (tail, ratio)
        const std::size_t n = contrib.size();
        const double last = contrib[n - 1];
        const double prev = contrib[n - 2];
        if (prev == 0.0) {
            return {last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity(), last == 0.0 ? 0.0 : 2.0};
        }
        const double ratio = std::abs(last / prev);
        if (ratio >= kRatioCeiling) {
            return {std::numeric_limits<double>::infinity(), ratio};
        }
        return {last * ratio / (1.0 - ratio), ratio};
    };

    while (true) {
        const double lo = 0.5 * hi;
        if (hi - lo < kMinPanelWidth) {
            break;
        }
        const double a = direction > 0 ? lo : -hi;
        const double b = direction > 0 ? hi : -lo;
        const auto panel = adapt(f, {Span{a, b}}, 0.05 * abs_tol, 0.05 * rel_tol, 0.0, budget);
        sum.add(panel.value);
        error += panel.error_estimate;
        contrib.push_back(panel.value);
        if (std::abs(sum.value()) > kDivergenceCap) {
            return {sum.value(), error, true};
        }
        if (contrib.size() >= 5) {
            const std::size_t n = contrib.size();
            if (contrib[n - 1] == 0.0 && contrib[n - 2] == 0.0 && contrib[n - 3] == 0.0) {
                return {sum.value(), error, false};
            }
            const auto [tail, ratio] = tail_of();
            const double tol = 0.25 * std::max(abs_tol, rel_tol * std::abs(sum.value()));
            if (std::isfinite(tail) && std::abs(tail) <= tol) {
                sum.add(tail);
                return {sum.value(), error + std::abs(tail), false};
            }
        }
        hi = lo;
    }

    // Width floor reached: extrapolate a decaying geometric tail, otherwise
    // the integral is treated as divergent.
    if (contrib.size() < 2) {
        return {sum.value(), error, false};
    }
    const auto [tail, ratio] = tail_of();
    if (!std::isfinite(tail)) {
        return {sum.value(), error, true};
    }
    sum.add(tail);
    const double total = sum.value();
    if (std::abs(total) > kDivergenceCap) {
        return {total, error, true};
    }
    return {total, error + std::abs(tail), false};
}

}  // namespace detail

// Integrates f over [lower, upper]; either bound may be infinite.
template <class F>
IntegrationResult integrate(const F& f, double lower, double upper,
                            const IntegrationOptions& opts = {}) {
    if (!(lower < upper)) {
        fail(ErrorKind::InvalidArgument, "integration bounds must satisfy lower < upper");
    }
    if (!(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) || opts.abs_tol < 0.0 || opts.rel_tol < 0.0) {
        fail(ErrorKind::InvalidArgument, "at least one tolerance must be strictly positive");
    }

    std::vector<double> cuts{lower, upper};
    for (double b : opts.breakpoints) {
        if (b > lower && b < upper && std::isfinite(b)) {
            cuts.push_back(b);
        }
    }
    const bool split_zero = opts.singular_at_zero && lower <= 0.0 && upper >= 0.0;
    if (split_zero && lower < 0.0 && upper > 0.0) {
        cuts.push_back(0.0);
    }
    if (std::isinf(lower) && std::isinf(upper)) {
        cuts.push_back(0.0);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    IntegrationResult singular{0.0, 0.0, false};
    std::vector<detail::Span> spans;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i];
        double b = cuts[i + 1];
        if (split_zero && a == 0.0) {
            const double s = std::min(b, 1.0);
            const auto side = detail::sweep_toward_zero(f, s, +1, 0.25 * opts.abs_tol,
                                                        opts.rel_tol, opts.max_subdivisions);
            singular.value += side.value;
            singular.error_estimate += side.error_estimate;
            singular.diverged = singular.diverged || side.diverged;
            if (s < b) {
                spans.push_back({s, b});
            }
        } else if (split_zero && b == 0.0) {
            const double s = std::min(-a, 1.0);
            const auto side = detail::sweep_toward_zero(f, s, -1, 0.25 * opts.abs_tol,
                                                        opts.rel_tol, opts.max_subdivisions);
            singular.value += side.value;
            singular.error_estimate += side.error_estimate;
            singular.diverged = singular.diverged || side.diverged;
            if (-s > a) {
                spans.push_back({a, -s});
            }
        } else {
            spans.push_back({a, b});
        }
    }
    if (singular.diverged) {
        return singular;
    }
    if (spans.empty()) {
        return singular;
    }
    const auto regular = detail::adapt(f, spans, 0.5 * opts.abs_tol, 0.5 * opts.rel_tol,
                                       singular.value, opts.max_subdivisions);
    return {regular.value + singular.value, regular.error_estimate + singular.error_estimate,
            false};
}

}  // namespace addgap::quad
