// SPDX-License-Identifier: Apache-2.0
//
// Test-side reference computations. Nothing here calls the library's
// quadrature: integrals over (0, inf) use a midpoint rule in u = log y on a
// fixed panel count, accumulated in long double.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace oracle {

/// Integral of f over [y_min, y_max] by the midpoint rule in log y.
template <class F>
long double log_riemann(const F& f, long double y_min, long double y_max, std::int64_t panels) {
    const long double u0 = std::log(y_min);
    const long double h = (std::log(y_max) - u0) / static_cast<long double>(panels);
    long double sum = 0.0L;
    for (std::int64_t k = 0; k < panels; ++k) {
        const long double y = std::exp(u0 + (static_cast<long double>(k) + 0.5L) * h);
        sum += f(y) * y;
    }
    return sum * h;
}

/// Composite Simpson rule on [a, b] with an even panel count.
template <class F>
long double simpson(const F& f, long double a, long double b, std::int64_t panels) {
    if (panels % 2 != 0) {
        ++panels;
    }
    const long double h = (b - a) / static_cast<long double>(panels);
    long double sum = f(a) + f(b);
    for (std::int64_t k = 1; k < panels; ++k) {
        sum += (k % 2 == 1 ? 4.0L : 2.0L) * f(a + static_cast<long double>(k) * h);
    }
    return sum * h / 3.0L;
}

/// Standard normal CDF by Simpson integration of the density from -12.
inline long double normal_cdf(long double x) {
    const long double c = 1.0L / std::sqrt(2.0L * std::numbers::pi_v<long double>);
    if (x <= -12.0L) {
        return 0.0L;
    }
    return simpson([c](long double t) { return c * std::exp(-0.5L * t * t); }, -12.0L, x, 200000);
}

/// Tempered stable side density C y^(-1-alpha) e^(-lambda y), y > 0.
inline long double ts_density(long double c, long double lambda, long double alpha, long double y) {
    return c * std::pow(y, -1.0L - alpha) * std::exp(-lambda * y);
}

struct TsSide {
    long double c;
    long double lambda;
};

/// Functionals of a tempered stable pair sharing alpha, per side. Below
/// y_min every integrand behaves like a power of y and its tail is added
/// analytically.
struct TsPairFunctionals {
    long double l1;
    long double h2;
    long double gamma1;
    long double gamma2;
};

inline TsPairFunctionals ts_pair(TsSide neg1, TsSide pos1, TsSide neg2, TsSide pos2,
                                 long double alpha, std::int64_t panels,
                                 long double y_min = 1e-20L, long double y_max = 400.0L) {
    TsPairFunctionals out{0, 0, 0, 0};
    const long double u0 = std::log(y_min);
    const long double h = (std::log(y_max) - u0) / static_cast<long double>(panels);
    for (int side = 0; side < 2; ++side) {
        const TsSide a = side == 0 ? neg1 : pos1;
        const TsSide b = side == 0 ? neg2 : pos2;
        const long double sign = side == 0 ? -1.0L : 1.0L;
        // One pass in u = log y; each integrand picks up the Jacobian y.
        long double l1 = 0, h2 = 0;
        for (std::int64_t k = 0; k < panels; ++k) {
            const long double u = u0 + (static_cast<long double>(k) + 0.5L) * h;
            const long double y = std::exp(u);
            const long double w = std::exp(-alpha * u);  // y^(-1-alpha) * y
            const long double d1 = a.c * w * std::exp(-a.lambda * y);
            const long double d2 = b.c * w * std::exp(-b.lambda * y);
            l1 += std::abs(d1 - d2);
            const long double r = std::sqrt(d1) - std::sqrt(d2);
            h2 += r * r;
        }
        // The compensators live on (0, 1]; their grid ends exactly at 1 so the
        // cutoff does not fall inside a panel.
        const long double hg = -u0 / static_cast<long double>(panels);
        long double g1 = 0, g2 = 0;
        for (std::int64_t k = 0; k < panels; ++k) {
            const long double u = u0 + (static_cast<long double>(k) + 0.5L) * hg;
            const long double y = std::exp(u);
            const long double w = y * std::exp(-alpha * u);
            g1 += a.c * w * std::exp(-a.lambda * y);
            g2 += b.c * w * std::exp(-b.lambda * y);
        }
        out.l1 += l1 * h;
        out.h2 += h2 * h;
        out.gamma1 += sign * g1 * hg;
        out.gamma2 += sign * g2 * hg;
        // Below y_min: |d1 - d2| ~ c |lambda1 - lambda2| y^(-alpha) with equal
        // constants, and y d ~ c y^(-alpha).
        if (alpha < 1.0L) {
            const long double tail = std::pow(y_min, 1.0L - alpha) / (1.0L - alpha);
            out.l1 += a.c * std::abs(a.lambda - b.lambda) * tail;
            out.gamma1 += sign * a.c * tail;
            out.gamma2 += sign * b.c * tail;
        }
    }
    return out;
}

}  // namespace oracle
