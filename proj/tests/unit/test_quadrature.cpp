// SPDX-License-Identifier: Apache-2.0
#include "addgap/quadrature.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using addgap::Error;
using addgap::ErrorKind;
using addgap::quad::IntegrationOptions;
using addgap::quad::integrate;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntegrationOptions singular() {
    IntegrationOptions o;
    o.singular_at_zero = true;
    return o;
}

}  // namespace

TEST(Quadrature, InverseSquareRootSingularity) {
    const auto r = integrate([](double y) { return 1.0 / std::sqrt(y); }, 0.0, 1.0, singular());
    EXPECT_FALSE(r.diverged);
    EXPECT_NEAR(r.value, 2.0, 2e-8);
}

TEST(Quadrature, SemiInfiniteExponential) {
    const auto r = integrate([](double y) { return std::exp(-y); }, 0.0, kInf);
    EXPECT_FALSE(r.diverged);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Quadrature, WholeLineGaussian) {
    const auto r = integrate([](double y) { return std::exp(-0.5 * y * y); }, -kInf, kInf);
    EXPECT_NEAR(r.value, std::sqrt(2.0 * std::numbers::pi), 1e-9);
}

TEST(Quadrature, LogDivergenceIsFlagged) {
    const auto r = integrate([](double y) { return 1.0 / y; }, 0.0, 1.0, singular());
    EXPECT_TRUE(r.diverged);
}

TEST(Quadrature, SteepButIntegrablePowerLaw) {
    // y^(-0.9) integrates to 10 on (0, 1]; the tail decays slowly.
    const auto r = integrate([](double y) { return std::pow(y, -0.9); }, 0.0, 1.0, singular());
    EXPECT_FALSE(r.diverged);
    EXPECT_NEAR(r.value, 10.0, 1e-6);
}

TEST(Quadrature, BothSidesOfTheOrigin) {
    // |y|^(-1/2) e^(-|y|) over R: 2 Gamma(1/2) = 2 sqrt(pi).
    const auto r = integrate(
        [](double y) { return y == 0.0 ? 0.0 : std::exp(-std::abs(y)) / std::sqrt(std::abs(y)); },
        -kInf, kInf, singular());
    EXPECT_NEAR(r.value, 2.0 * std::sqrt(std::numbers::pi), 1e-7);
}

TEST(Quadrature, BreakpointsAtKinks) {
    IntegrationOptions o;
    o.breakpoints = {0.3};
    const auto r = integrate([](double y) { return std::abs(y - 0.3); }, 0.0, 1.0, o);
    EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-14);
}

TEST(Quadrature, DiscontinuityWithBreakpoint) {
    IntegrationOptions o;
    o.breakpoints = {1.0 / 3.0};
    const auto r = integrate([](double y) { return y < 1.0 / 3.0 ? 1.0 : 5.0; }, 0.0, 1.0, o);
    EXPECT_NEAR(r.value, 1.0 / 3.0 + 5.0 * 2.0 / 3.0, 1e-13);
}

TEST(Quadrature, MatchesLongDoubleSimpson) {
    auto f = [](long double y) { return std::sin(3.0L * y) * std::exp(-y * y / 4.0L); };
    const long double ref = oracle::simpson(f, -1.0L, 2.5L, 2000000);
    const auto r = integrate([&f](double y) { return static_cast<double>(f(y)); }, -1.0, 2.5);
    EXPECT_NEAR(r.value, static_cast<double>(ref), 1e-11);
}

TEST(Quadrature, NonFiniteIntegrandThrows) {
    try {
        integrate([](double y) { return y > 0.5 ? std::nan("") : 1.0; }, 0.0, 1.0);
        FAIL() << "expected an exception";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFiniteIntegrand);
    }
}

TEST(Quadrature, ExhaustedBudgetThrows) {
    IntegrationOptions o;
    o.max_subdivisions = 2;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-14;
    try {
        integrate([](double y) { return std::sqrt(std::abs(y - 0.123456789)); }, 0.0, 1.0, o);
        FAIL() << "expected an exception";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ToleranceNotMet);
    }
}

TEST(Quadrature, RejectsEmptyInterval) {
    EXPECT_THROW(integrate([](double) { return 1.0; }, 1.0, 1.0), Error);
}

TEST(Quadrature, ErrorEstimateIsSmall) {
    const auto r = integrate([](double y) { return std::cos(y); }, 0.0, 1.0);
    EXPECT_LT(r.error_estimate, 1e-10);
    EXPECT_NEAR(r.value, std::sin(1.0), 1e-14);
}
