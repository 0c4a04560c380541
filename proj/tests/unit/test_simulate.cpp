// SPDX-License-Identifier: Apache-2.0
#include "addgap/normal.hpp"
#include "addgap/processes.hpp"
#include "addgap/simulate.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

using namespace addgap;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& x) {
    long double s = 0, s2 = 0;
    for (double v : x) {
        s += v;
    }
    const long double m = s / static_cast<long double>(x.size());
    for (double v : x) {
        s2 += (v - m) * (v - m);
    }
    return {static_cast<double>(m), static_cast<double>(s2 / static_cast<long double>(x.size() - 1))};
}

// Kolmogorov-Smirnov statistic of a sample against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> x, const Cdf& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

// 1% critical value of the one-sample KS statistic.
double ks_critical(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

LevyMeasure ts(double alpha) { return LevyMeasure::tempered_stable(0.5, 1.5, 3.0, 2.0, alpha); }

}  // namespace

TEST(Philox, KnownAnswers) {
    using philox::block;
    const auto z = block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(z, (philox::Counter{0x6627e8d5U, 0xe169c58dU, 0xbc57ac4cU, 0x9b00dbd8U}));
    const auto ones = block({0xffffffffU, 0xffffffffU, 0xffffffffU, 0xffffffffU},
                            {0xffffffffU, 0xffffffffU});
    EXPECT_EQ(ones, (philox::Counter{0x408f276dU, 0x41c83b0eU, 0xa20bc7c6U, 0x6d5451fdU}));
    const auto pi = block({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U},
                          {0xa4093822U, 0x299f31d0U});
    EXPECT_EQ(pi, (philox::Counter{0xd16cfe09U, 0x94fdccebU, 0x5001e420U, 0x24126ea1U}));
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
    RngStream a(42, 7, 0), b(42, 7, 0), c(42, 8, 0), d(42, 7, 1), e(43, 7, 0);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
        EXPECT_NE(x, d());
        EXPECT_NE(x, e());
    }
}

TEST(Rng, UniformIsOpenAndNormalMoments) {
    RngStream r(1, 0);
    std::vector<double> z(200000);
    for (auto& v : z) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        v = r.normal();
    }
    const auto m = moments(z);
    EXPECT_NEAR(m.mean, 0.0, 4.0 / std::sqrt(2e5));
    EXPECT_NEAR(m.var, 1.0, 4.0 * std::sqrt(2.0 / 2e5));
    EXPECT_LT(ks_statistic(z, [](double x) { return normal_cdf(x); }), ks_critical(z.size()));
}

TEST(Rng, SubstreamsAreUncorrelated) {
    const std::size_t n = 200000;
    long double sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream jump(9, i, kJumpSubstream), gauss(9, i, kGaussianSubstream);
        sxy += (jump.uniform() - 0.5L) * (gauss.uniform() - 0.5L);
    }
    // Var(U) = 1/12, so the correlation estimate is 12 * mean product.
    const double corr = static_cast<double>(12.0L * sxy / static_cast<long double>(n));
    EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(JumpSizes, FamiliesMatchTheirCdfs) {
    const std::size_t n = 50000;
    RngStream r(3, 0);
    std::vector<double> u(n), e(n), g(n), t(n);
    const auto uni = JumpDensity::uniform(-1.0, 2.0);
    const auto expo = JumpDensity::exponential(2.5);
    const auto norm = JumpDensity::normal(0.3, 0.49);
    // Piecewise-linear density 0 -> 2 on [0, 1]: CDF y^2.
    const auto tab = JumpDensity::tabulated({0.0, 1.0}, {0.0, 2.0});
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = sample_jump_size(uni, r);
        e[i] = sample_jump_size(expo, r);
        g[i] = sample_jump_size(norm, r);
        t[i] = sample_jump_size(tab, r);
    }
    const double crit = ks_critical(n);
    EXPECT_LT(ks_statistic(u, [](double y) { return (y + 1.0) / 3.0; }), crit);
    EXPECT_LT(ks_statistic(e, [](double y) { return -std::expm1(-2.5 * y); }), crit);
    EXPECT_LT(ks_statistic(g, [](double y) { return normal_cdf((y - 0.3) / 0.7); }), crit);
    EXPECT_LT(ks_statistic(t, [](double y) { return y * y; }), crit);
    EXPECT_NEAR(moments(u).mean, 0.5, 4.0 * std::sqrt(0.75 / n));
    EXPECT_NEAR(moments(e).mean, 0.4, 4.0 * 0.4 / std::sqrt(n));
}

TEST(JumpSizes, TabulatedZeroCellIsNeverHit) {
    // Linear interpolation: two zero knots make (2, 3) a zero cell.
    const auto tab =
        JumpDensity::tabulated({0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {1.0, 1.0, 0.0, 0.0, 1.0, 1.0});
    RngStream r(4, 0);
    for (int i = 0; i < 20000; ++i) {
        const double y = sample_jump_size(tab, r);
        EXPECT_FALSE(y > 2.0 && y < 3.0) << y;
    }
}

TEST(JumpSizes, NarrowTabulatedCellConfinesDraws) {
    const double w = 1e-6;
    const auto tab = JumpDensity::tabulated({1.0 - w, 1.0, 1.0 + w}, {0.0, 1.0 / w, 0.0});
    RngStream r(5, 0);
    for (int i = 0; i < 10000; ++i) {
        const double y = sample_jump_size(tab, r);
        EXPECT_GE(y, 1.0 - w);
        EXPECT_LE(y, 1.0 + w);
    }
}

TEST(CompoundPoisson, CountMomentsAndTimes) {
    const auto nu = LevyMeasure::compound_poisson(2.0, JumpDensity::uniform(0.0, 1.0));
    const double horizon = 3.0;
    std::vector<double> counts;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        RngStream r(11, i);
        const auto rec = sample_compound_poisson(nu, horizon, r);
        counts.push_back(static_cast<double>(rec.count()));
        ASSERT_TRUE(std::is_sorted(rec.times.begin(), rec.times.end()));
        for (double t : rec.times) {
            ASSERT_GT(t, 0.0);
            ASSERT_LE(t, horizon);
        }
    }
    const auto m = moments(counts);
    EXPECT_NEAR(m.mean, 6.0, 4.0 * std::sqrt(6.0 / 40000));
    EXPECT_NEAR(m.var, 6.0, 0.2);
}

TEST(CompoundPoisson, ZeroHorizonAndZeroMeasure) {
    RngStream r(5, 0);
    const auto nu = LevyMeasure::compound_poisson(2.0, JumpDensity::uniform(0.0, 1.0));
    EXPECT_EQ(sample_compound_poisson(nu, 0.0, r).count(), 0u);
    EXPECT_EQ(sample_compound_poisson(LevyMeasure::zero(), 5.0, r).count(), 0u);
    EXPECT_THROW(sample_compound_poisson(ts(0.5), 1.0, r), Error);
}

TEST(CompoundPoisson, TerminalMeanIsCompensated) {
    // Uniform(0,1) jumps all lie in |y| <= 1, so the compensated sum has mean zero.
    const auto nu = LevyMeasure::compound_poisson(2.0, JumpDensity::uniform(0.0, 1.0));
    std::vector<double> x;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        RngStream r(12, i);
        x.push_back(sample_compound_poisson(nu, 1.5, r).terminal_value(1.5));
    }
    // Var = T lambda E[Y^2] = 1.5 * 2 / 3.
    EXPECT_NEAR(moments(x).mean, 0.0, 4.0 * std::sqrt(1.0 / 40000));
    EXPECT_NEAR(moments(x).var, 1.0, 0.05);
}

TEST(Truncated, IntensityAndCountMatchOracle) {
    const double alpha = 0.5, eps = 1e-3, horizon = 2.0;
    const auto nu = ts(alpha);
    auto side = [&](long double c, long double lam) {
        return oracle::log_riemann(
            [&](long double y) { return oracle::ts_density(c, lam, alpha, y); }, eps, 400.0L, 2000000);
    };
    const long double m_neg = side(0.5L, 3.0L), m_pos = side(1.5L, 2.0L);
    const double m_eps = static_cast<double>(m_neg + m_pos);
    const JumpSampler sampler(nu, eps);
    EXPECT_NEAR(sampler.intensity() / m_eps, 1.0, 1e-8);

    std::vector<double> counts;
    std::vector<double> positive;
    std::size_t n_pos = 0, n_all = 0;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        RngStream r(13, i);
        const auto rec = sample_truncated_jumps(nu, eps, horizon, r);
        counts.push_back(static_cast<double>(rec.count()));
        for (double y : rec.sizes) {
            ASSERT_GT(std::abs(y), eps);
            ++n_all;
            if (y > 0.0) {
                ++n_pos;
                if (positive.size() < 5000) {
                    positive.push_back(y);
                }
            }
        }
    }
    const double expect = horizon * m_eps;
    EXPECT_NEAR(moments(counts).mean, expect, 4.0 * std::sqrt(expect / 4000));
    const double p = static_cast<double>(m_pos) / m_eps;
    EXPECT_NEAR(static_cast<double>(n_pos) / static_cast<double>(n_all), p,
                4.0 * std::sqrt(p * (1 - p) / static_cast<double>(n_all)));

    // Positive sizes against the normalised restricted measure; the CDF is
    // accumulated piece by piece along the sorted sample.
    std::sort(positive.begin(), positive.end());
    std::vector<double> f(positive.size());
    long double acc = 0.0L, prev = eps;
    for (std::size_t i = 0; i < positive.size(); ++i) {
        if (positive[i] > prev) {
            acc += oracle::log_riemann(
                [&](long double x) { return oracle::ts_density(1.5L, 2.0L, alpha, x); }, prev,
                positive[i], 400);
            prev = positive[i];
        }
        f[i] = static_cast<double>(acc / m_pos);
    }
    double d = 0.0;
    const double n = static_cast<double>(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        d = std::max({d, f[i] - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f[i]});
    }
    EXPECT_LT(d, ks_critical(f.size()));
}

TEST(Truncated, TerminalVarianceMatchesRestrictedMoment) {
    const double horizon = 1.0;
    const auto nu = LevyMeasure::tempered_stable(1.0, 1.0, 1.0, 2.0, 0.5);
    for (double eps : {0.1, 1e-3}) {
        const TerminalSampler s({TimeFunction::constant(0.0), TimeFunction::constant(0.0), nu},
                                horizon, eps);
        std::vector<double> x;
        for (std::uint64_t i = 0; i < 40000; ++i) {
            RngStream j(14, i, kJumpSubstream), g(14, i, kGaussianSubstream);
            x.push_back(s.sample(j, g));
        }
        long double second = 0;
        for (auto [cc, lam] : {std::pair{1.0L, 1.0L}, std::pair{1.0L, 2.0L}}) {
            second += oracle::log_riemann(
                [&](long double y) { return y * y * oracle::ts_density(cc, lam, 0.5L, y); },
                eps, 400.0L, 400000);
        }
        const double v = static_cast<double>(second) * horizon;
        const auto m = moments(x);
        EXPECT_NEAR(m.var / v, 1.0, 0.05) << "eps=" << eps;
        // Compensated jumps beyond 1 carry mean E = int_{|y|>1} y nu(dy).
        long double big = 0;
        for (auto [sgn, lam] : {std::pair{-1.0L, 1.0L}, std::pair{1.0L, 2.0L}}) {
            big += sgn * oracle::log_riemann(
                             [&](long double y) { return y * oracle::ts_density(1.0L, lam, 0.5L, y); },
                             1.0L, 400.0L, 400000);
        }
        EXPECT_NEAR(m.mean, static_cast<double>(big) * horizon, 4.0 * std::sqrt(v / 40000));
    }
}

TEST(Truncated, SmallJumpCorrectionAddsVariance) {
    const auto nu = LevyMeasure::tempered_stable(1.0, 1.0, 1.0, 2.0, 0.5);
    const ProcessSpec p{TimeFunction::constant(0.0), TimeFunction::constant(0.0), nu};
    const double eps = 0.1;
    const double extra = small_jump_second_moment(nu, eps);
    long double oracle_extra = 0;
    for (double lam : {1.0, 2.0}) {
        oracle_extra += oracle::log_riemann(
            [&](long double y) { return y * y * oracle::ts_density(1.0L, lam, 0.5L, y); }, 1e-20L, eps,
            400000);
    }
    EXPECT_NEAR(extra / static_cast<double>(oracle_extra), 1.0, 1e-7);
    const TerminalSampler plain(p, 1.0, eps), corrected(p, 1.0, eps, true);
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        RngStream j1(15, i, 0), g1(15, i, 1), j2(15, i, 0), g2(15, i, 1);
        a.push_back(plain.sample(j1, g1));
        b.push_back(corrected.sample(j2, g2));
    }
    EXPECT_GT(moments(b).var, moments(a).var);
    EXPECT_NEAR(moments(b).var - moments(a).var, extra, 0.25 * extra);
}

TEST(Truncated, InfiniteActivityNeedsEpsilon) {
    RngStream r(6, 0);
    EXPECT_THROW(sample_truncated_jumps(ts(0.5), 0.0, 1.0, r), Error);
    EXPECT_THROW(JumpSampler(ts(0.5), -1.0), Error);
}

TEST(Truncated, EpsilonAboveSupportGivesNoJumps) {
    const auto nu = LevyMeasure::compound_poisson(3.0, JumpDensity::uniform(0.0, 1.0));
    RngStream r(7, 0);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_truncated_jumps(nu, 1.5, 2.0, r).count(), 0u);
    }
}

TEST(GaussianPart, CtMoments) {
    const double xi2 = 0.8;
    std::vector<double> c, ec;
    for (std::uint64_t i = 0; i < 200000; ++i) {
        RngStream r(16, i, kGaussianSubstream);
        c.push_back(sample_C_T(xi2, r));
        ec.push_back(std::exp(c.back()));
    }
    const auto m = moments(c);
    EXPECT_NEAR(m.mean, -0.4, 4.0 * std::sqrt(xi2 / 2e5));
    EXPECT_NEAR(m.var, xi2, 0.02);
    EXPECT_NEAR(moments(ec).mean, 1.0, 4.0 * std::sqrt(std::expm1(xi2) / 2e5));
    RngStream r(1, 0);
    EXPECT_EQ(sample_C_T(0.0, r), 0.0);
}

TEST(Determinism, SameAddressSamePath) {
    const auto nu = LevyMeasure::tempered_stable(1.0, 1.0, 1.0, 2.0, 0.5);
    const JumpSampler s(nu, 1e-3);
    RngStream a(99, 5), b(99, 5);
    const auto ra = s.sample(1.0, a), rb = s.sample(1.0, b);
    EXPECT_EQ(ra.times, rb.times);
    EXPECT_EQ(ra.sizes, rb.sizes);
}

TEST(PathsCsv, HeaderAndRows) {
    JumpRecord r;
    r.times = {0.25, 0.5};
    r.sizes = {0.1, -0.2};
    std::ostringstream os;
    write_paths_csv(os, {JumpRecord{}, r});
    EXPECT_EQ(os.str(), "path_id,jump_time,jump_size\n1,0.25,0.10000000000000001\n1,0.5,-0.20000000000000001\n");
}

TEST(Terminal, EmpiricalCharacteristicFunction) {
    const ProcessSpec p{TimeFunction::constant(0.0), TimeFunction::constant(0.0),
                        LevyMeasure::compound_poisson(1.5, JumpDensity::uniform(0.0, 1.0))};
    const TerminalSampler sampler(p, 1.0);
    const std::uint64_t n = 200000;
    const double u = 2.0;
    long double sc = 0, ss = 0, sc2 = 0, ss2 = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        RngStream j(21, i, kJumpSubstream), g(21, i, kGaussianSubstream);
        const double x = sampler.sample(j, g);
        const long double c = std::cos(u * x), s = std::sin(u * x);
        sc += c;
        ss += s;
        sc2 += c * c;
        ss2 += s * s;
    }
    const double mc = static_cast<double>(sc / n), ms = static_cast<double>(ss / n);
    const double sec = std::sqrt(static_cast<double>(sc2 / n) - mc * mc) / std::sqrt(double(n));
    const double ses = std::sqrt(static_cast<double>(ss2 / n) - ms * ms) / std::sqrt(double(n));
    // exp(1.5 (E e^{iuY} - 1) - iu gamma) with Y uniform(0, 1); the small jumps are
    // compensated, gamma = 1.5 * 1/2
    const std::complex<double> gu(std::sin(u) / u, (1.0 - std::cos(u)) / u);
    const auto want = std::exp(1.5 * (gu - 1.0) - std::complex<double>(0.0, u * 0.75));
    EXPECT_NEAR(std::abs(char_function(p, u, 1.0) - want), 0.0, 1e-9);
    EXPECT_NEAR(mc, want.real(), 4.0 * sec);
    EXPECT_NEAR(ms, want.imag(), 4.0 * ses);
}
