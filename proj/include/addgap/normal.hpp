// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "addgap/error.hpp"

#include <cmath>
#include <numbers>

namespace addgap {

/// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) {
    if (std::isnan(x)) {
        return x;
    }
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// E|1 - e^X| for X ~ N(m, s^2).
inline double e_abs_one_minus_exp_normal(double m, double s) {
    if (!(s >= 0.0)) {
        fail(ErrorKind::InvalidArgument, "standard deviation must be nonnegative");
    }
    if (s == 0.0) {
        return std::abs(std::expm1(m));
    }
    // Split at X = 0 and use E[e^X; X < 0] = e^(m + s^2/2) Phi(z - s).
    const double z = -m / s;
    return 2.0 * normal_cdf(z) - 1.0 + std::exp(m + 0.5 * s * s) * (1.0 - 2.0 * normal_cdf(z - s));
}

}  // namespace addgap
