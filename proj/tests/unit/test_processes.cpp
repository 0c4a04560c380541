// SPDX-License-Identifier: Apache-2.0
#include "addgap/processes.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace addgap;
using cd = std::complex<double>;

namespace {

ProcessSpec gaussian(double drift, double vol_sq) {
    return {TimeFunction::constant(drift), TimeFunction::constant(vol_sq), LevyMeasure::zero()};
}

}  // namespace

TEST(TimeFunction, EvaluationAndExactIntegrals) {
    const auto p = TimeFunction::polynomial({1.0, -2.0, 3.0});
    EXPECT_DOUBLE_EQ(p(2.0), 1.0 - 4.0 + 12.0);
    const auto ref = oracle::simpson([](long double t) { return 1.0L - 2.0L * t + 3.0L * t * t; },
                                     0.5L, 2.5L, 1000);
    EXPECT_NEAR(p.integral(0.5, 2.5), static_cast<double>(ref), 1e-13);

    const auto pc = TimeFunction::piecewise_constant({0.5, 1.5}, {1.0, 2.0, 4.0});
    EXPECT_DOUBLE_EQ(pc(0.0), 1.0);
    EXPECT_DOUBLE_EQ(pc(0.5), 2.0);
    EXPECT_DOUBLE_EQ(pc(2.0), 4.0);
    EXPECT_NEAR(pc.integral(0.0, 2.0), 0.5 + 2.0 + 2.0, 1e-15);
    EXPECT_NEAR(TimeFunction::constant(3.0).integral(1.0, 2.5), 4.5, 1e-15);
}

TEST(TimeFunction, RejectsMalformedPieces) {
    EXPECT_THROW(TimeFunction::piecewise_constant({0.5}, {1.0}), Error);
    EXPECT_THROW(TimeFunction::piecewise_constant({0.5, 0.2}, {1.0, 2.0, 3.0}), Error);
    EXPECT_THROW(TimeFunction::constant(std::nan("")), Error);
}

TEST(VolRegime, ClassifiesProfiles) {
    EXPECT_EQ(vol_regime(TimeFunction::constant(0.0), 1.0), VolRegime::Zero);
    EXPECT_EQ(vol_regime(TimeFunction::constant(0.3), 1.0), VolRegime::Positive);
    // Mixed zero / positive is rejected.
    EXPECT_THROW(vol_regime(TimeFunction::piecewise_constant({0.5}, {0.0, 1.0}), 1.0), Error);
    EXPECT_THROW(vol_regime(TimeFunction::constant(-1.0), 1.0), Error);
}

TEST(Validate, RejectsBadHorizonAndMeasures) {
    ProblemSpec s{gaussian(0, 1), gaussian(0, 1), 0.0};
    EXPECT_THROW(validate(s), Error);
    s.horizon = 1.0;
    EXPECT_NO_THROW(validate(s));
}

TEST(XiSq, ConstantGap) {
    ProblemSpec s{gaussian(1.0, 1.0), gaussian(0.0, 1.0), 4.0};
    EXPECT_NEAR(xi_sq(s), 4.0, 1e-12);
}

TEST(XiSq, TimeDependentGapMatchesSimpson) {
    ProblemSpec s;
    s.p1 = {TimeFunction::polynomial({0.2, 0.5}),
            TimeFunction::piecewise_constant({0.5}, {1.0, 2.0}), LevyMeasure::zero()};
    s.p2 = {TimeFunction::constant(0.0), TimeFunction::piecewise_constant({0.5}, {1.0, 2.0}),
            LevyMeasure::zero()};
    s.horizon = 1.0;
    auto g = [](long double t) { return (0.2L + 0.5L * t) * (0.2L + 0.5L * t); };
    const long double ref =
        oracle::simpson(g, 0.0L, 0.5L, 1000) + oracle::simpson(g, 0.5L, 1.0L, 1000) / 2.0L;
    EXPECT_NEAR(xi_sq(s), static_cast<double>(ref), 1e-13);
}

TEST(XiSq, ZeroVolatilityThrows) {
    ProblemSpec s{gaussian(1.0, 0.0), gaussian(0.0, 0.0), 1.0};
    try {
        xi_sq(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroVolatility);
    }
}

TEST(Drift, MatchAtZeroVolatility) {
    const auto g = JumpDensity::uniform(0.0, 1.0);
    ProblemSpec s;
    s.p1 = {TimeFunction::constant(1.0), TimeFunction::constant(0.0),
            LevyMeasure::compound_poisson(2.0, g)};
    s.p2 = {TimeFunction::constant(0.5), TimeFunction::constant(0.0),
            LevyMeasure::compound_poisson(1.0, g)};
    EXPECT_TRUE(drift_match_check(s).ok);
    s.p1.drift = TimeFunction::constant(1.1);
    const auto d = drift_match_check(s);
    EXPECT_FALSE(d.ok);
    EXPECT_NEAR(d.sup_gap, 0.1, 1e-12);
}

TEST(SigmaMismatch, Detected) {
    ProblemSpec s{gaussian(0, 1.0), gaussian(0, 2.0), 1.0};
    EXPECT_TRUE(sigma_mismatch(s));
    EXPECT_NEAR(vol_sq_gap(s), 1.0, 1e-15);
}

TEST(CharFunction, GaussianClosedForm) {
    const ProcessSpec p{TimeFunction::constant(0.7), TimeFunction::constant(1.3), LevyMeasure::zero()};
    for (double u : {0.5, 1.0, 2.0}) {
        const cd want = std::exp(cd(-0.5 * u * u * 1.3 * 2.0, u * 0.7 * 2.0));
        const cd got = char_function(p, u, 2.0);
        EXPECT_NEAR(std::abs(got - want), 0.0, 1e-12);
    }
}

TEST(CharFunction, CompoundPoissonClosedForm) {
    // uniform(0,1) sizes, lambda = 2: the compensator of |y| <= 1 is lambda / 2.
    const double lambda = 2.0;
    const double f = 0.3;
    const ProcessSpec p{TimeFunction::constant(f), TimeFunction::constant(0.0),
                        LevyMeasure::compound_poisson(lambda, JumpDensity::uniform(0.0, 1.0))};
    const double t = 1.5;
    for (double u : {0.5, 1.0, 2.0, 5.0}) {
        const cd phi_g = (std::exp(cd(0.0, u)) - 1.0) / cd(0.0, u);
        const cd expo = t * (lambda * (phi_g - 1.0) - cd(0.0, u * lambda * 0.5) + cd(0.0, u * f));
        EXPECT_NEAR(std::abs(char_function(p, u, t) - std::exp(expo)), 0.0, 1e-10) << "u=" << u;
    }
}

TEST(CharFunction, TemperedStableClosedForm) {
    // For 0 < alpha < 1 each side contributes C Gamma(-alpha) ((lambda -+ iu)^alpha - lambda^alpha);
    // the truncation term -iu gamma uses the log-Riemann oracle.
    const double alpha = 0.5;
    const ProcessSpec p{TimeFunction::constant(0.0), TimeFunction::constant(0.0),
                        LevyMeasure::tempered_stable(1.0, 1.5, 1.0, 2.0, alpha)};
    const auto o = oracle::ts_pair({1.0, 1.0}, {1.5, 2.0}, {1.0, 1.0}, {1.5, 2.0}, alpha, 1000000);
    const double gamma = static_cast<double>(o.gamma1);
    for (double u : {0.5, 1.0, 2.0, 5.0}) {
        const double g = std::tgamma(-alpha);
        const cd neg = 1.0 * g * (std::pow(cd(1.0, u), alpha) - std::pow(1.0, alpha));
        const cd pos = 1.5 * g * (std::pow(cd(2.0, -u), alpha) - std::pow(2.0, alpha));
        const cd expo = neg + pos - cd(0.0, u * gamma);
        EXPECT_NEAR(std::abs(char_function(p, u, 1.0) - std::exp(expo)), 0.0, 1e-8) << "u=" << u;
    }
}

TEST(Eta, DifferenceOfCompensators) {
    const auto g = JumpDensity::uniform(0.0, 1.0);
    EXPECT_NEAR(eta(LevyMeasure::compound_poisson(1.2, g), LevyMeasure::compound_poisson(1.0, g)),
                0.1, 1e-12);
    EXPECT_EQ(eta(LevyMeasure::zero(), LevyMeasure::zero()), 0.0);
}

TEST(Eta, AnalyticCompensators) {
    const auto g = JumpDensity::uniform(0.0, 1.0);
    EXPECT_NEAR(eta(LevyMeasure::compound_poisson(3.0, g), LevyMeasure::compound_poisson(1.0, g)),
                1.0, 1e-12);
}

TEST(XiSq, LinearDriftGap) {
    ProblemSpec s{{TimeFunction::polynomial({0.0, 1.0}), TimeFunction::constant(1.0), LevyMeasure::zero()},
                  gaussian(0.0, 1.0), 1.0};
    const long double ref = oracle::simpson([](long double t) { return t * t; }, 0.0L, 1.0L, 1000);
    EXPECT_NEAR(xi_sq(s), static_cast<double>(ref), 1e-13);
    EXPECT_NEAR(xi_sq(s), 1.0 / 3.0, 1e-13);
}

TEST(XiSq, SymmetricUnderSwap) {
    const auto g = JumpDensity::exponential(2.0);
    ProblemSpec s{{TimeFunction::polynomial({0.2, -0.4}), TimeFunction::constant(0.5),
                   LevyMeasure::compound_poisson(2.0, g)},
                  {TimeFunction::constant(0.1), TimeFunction::constant(0.5),
                   LevyMeasure::compound_poisson(0.7, g)},
                  1.5};
    const double a = xi_sq(s);
    std::swap(s.p1, s.p2);
    EXPECT_NEAR(xi_sq(s), a, 1e-12);
    EXPECT_GE(a, 0.0);
    ProblemSpec same{gaussian(0.4, 2.0), gaussian(0.4, 2.0), 3.0};
    EXPECT_EQ(xi_sq(same), 0.0);
}

TEST(Drift, MismatchedCompensatorsAndSymmetricJumps) {
    const auto g = JumpDensity::uniform(0.0, 1.0);
    ProblemSpec s{{TimeFunction::constant(0.2), TimeFunction::constant(0.0),
                   LevyMeasure::compound_poisson(2.0, g)},
                  {TimeFunction::constant(0.2), TimeFunction::constant(0.0),
                   LevyMeasure::compound_poisson(1.0, g)},
                  1.0};
    EXPECT_FALSE(drift_match_check(s).ok);
    // Symmetric jumps at equal intensity: both compensators vanish.
    const auto sym = JumpDensity::normal(0.0, 0.5);
    ProblemSpec t{{TimeFunction::constant(0.2), TimeFunction::constant(0.0),
                   LevyMeasure::compound_poisson(1.5, sym)},
                  {TimeFunction::constant(0.2), TimeFunction::constant(0.0),
                   LevyMeasure::compound_poisson(1.5, sym)},
                  1.0};
    const auto d = drift_match_check(t);
    EXPECT_TRUE(d.ok);
    EXPECT_NEAR(d.sup_gap, 0.0, 1e-12);
}

TEST(CharFunction, TrivialCasesAndSymmetries) {
    const ProcessSpec drift_only{TimeFunction::constant(0.8), TimeFunction::constant(0.0),
                                 LevyMeasure::zero()};
    EXPECT_NEAR(std::abs(char_function(drift_only, 1.7, 2.0) - std::exp(cd(0.0, 1.7 * 0.8 * 2.0))), 0.0,
                1e-14);
    const ProcessSpec p{TimeFunction::polynomial({0.1, 0.3}), TimeFunction::constant(0.4),
                        LevyMeasure::tempered_stable(1.0, 0.5, 1.0, 2.0, 0.7)};
    EXPECT_NEAR(std::abs(char_function(p, 0.0, 1.0) - cd(1.0, 0.0)), 0.0, 1e-15);
    for (double u : {0.3, 1.0, 4.0, 12.0}) {
        for (double t : {0.25, 1.0, 2.0}) {
            const cd a = char_function(p, u, t);
            const cd b = char_function(p, -u, t);
            EXPECT_LE(std::abs(a), 1.0 + 1e-12);
            EXPECT_NEAR(std::abs(b - std::conj(a)), 0.0, 1e-10) << u << ' ' << t;
        }
    }
}
