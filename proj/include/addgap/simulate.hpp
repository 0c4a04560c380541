// SPDX-License-Identifier: Apache-2.0
//
// Path sampling along the Levy-Ito decomposition. Jump parts are simulated
// exactly for finite-activity measures and by truncation at |y| > epsilon
// (with compensator bookkeeping) otherwise. The continuous part is never
// discretized: every functional needed downstream is Gaussian in closed form.
#pragma once

#include "addgap/error.hpp"
#include "addgap/measures.hpp"
#include "addgap/piecewise_density.hpp"
#include "addgap/processes.hpp"
#include "addgap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

namespace addgap {

inline constexpr double kDefaultTruncation = 1e-4;
inline constexpr std::size_t kSamplerKnots = 4096;

// Substream tags: jumps and Gaussian parts of one replication never share a
// counter range.
inline constexpr std::uint32_t kJumpSubstream = 0;
inline constexpr std::uint32_t kGaussianSubstream = 1;

struct JumpRecord {
    std::vector<double> times;  // sorted, in (0, T]
    std::vector<double> sizes;  // one per time, |size| > truncation_epsilon
    double truncation_epsilon = 0.0;
    // Per unit time: -integral of y over epsilon < |y| <= 1.
    double compensator_shift = 0.0;

    [[nodiscard]] std::size_t count() const { return sizes.size(); }

    [[nodiscard]] double jump_sum() const {
        double s = 0.0;
        for (double x : sizes) {
            s += x;
        }
        return s;
    }

    /// Value of the compensated jump part at time `horizon`.
    [[nodiscard]] double terminal_value(double horizon) const {
        return jump_sum() + horizon * compensator_shift;
    }
};

inline double sample_jump_size(const JumpDensity& d, RngStream& rng) {
    return std::visit(
        [&rng](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, UniformJumps>) {
                return f.a + (f.b - f.a) * rng.uniform();
            } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                return -std::log(rng.uniform()) / f.rate;
            } else if constexpr (std::is_same_v<T, NormalJumps>) {
                return f.mean + std::sqrt(f.variance) * rng.normal();
            } else {
                return f.table.quantile(rng.uniform());
            }
        },
        d.family());
}

namespace detail {

inline std::uint64_t sample_poisson(double mean, RngStream& rng) {
    if (!(mean > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(rng);
}

inline std::vector<double> sorted_uniform_times(std::uint64_t n, double horizon, RngStream& rng) {
    std::vector<double> t(n);
    for (auto& x : t) {
        x = horizon * rng.uniform();
    }
    std::sort(t.begin(), t.end());
    return t;
}

// Shape of one side of a measure restricted to |y| >= lo, tabulated over |y|.
// With an inner zone, the power law v (|y|/lo)^p also covers (0, lo).
struct SideShape {
    PiecewiseDensity table;
    double inner_mass = 0.0;
    double inner_exponent = 0.0;
    double lo = 0.0;

    [[nodiscard]] double mass() const { return table.mass() + inner_mass; }

    [[nodiscard]] double draw_abs(RngStream& rng) const {
        const double u = rng.uniform();
        const double total = mass();
        if (inner_mass > 0.0 && u * total < inner_mass) {
            const double w = rng.uniform();
            return lo * std::pow(w, 1.0 / (inner_exponent + 1.0));
        }
        return table.quantile(rng.uniform());
    }
};

}  // namespace detail

/// Precomputed jump sampler for one measure and truncation level.
class JumpSampler {
public:
    JumpSampler(const LevyMeasure& nu, double epsilon) : epsilon_(epsilon) {
        if (epsilon < 0.0 || !std::isfinite(epsilon)) {
            fail(ErrorKind::InvalidArgument, "truncation epsilon must be finite and >= 0");
        }
        if (nu.is_zero()) {
            return;
        }
        if (const auto* cp = nu.as<CompoundPoisson>()) {
            cp_ = *cp;
            rate_ = cp->intensity;
            shift_ = -truncated_gamma(nu, epsilon);
            return;
        }
        if (epsilon == 0.0 && std::isinf(total_mass(nu))) {
            fail(ErrorKind::DivergentMass,
                 "infinite-activity measure needs a truncation epsilon > 0");
        }
        shift_ = -truncated_gamma(nu, epsilon);
        const auto extent = support_extent(nu);
        neg_ = build_side(nu, -1.0, extent.negative);
        pos_ = build_side(nu, +1.0, extent.positive);
        const double neg_shape = neg_ ? neg_->mass() : 0.0;
        const double pos_shape = pos_ ? pos_->mass() : 0.0;
        if (epsilon > 0.0) {
            // Intensity from quadrature; the tables only carry the shape.
            const double neg_mass = neg_ ? side_mass(nu, -1.0) : 0.0;
            const double pos_mass = pos_ ? side_mass(nu, +1.0) : 0.0;
            rate_ = neg_mass + pos_mass;
            p_pos_ = rate_ > 0.0 ? pos_mass / rate_ : 0.0;
        } else {
            rate_ = neg_shape + pos_shape;
            p_pos_ = rate_ > 0.0 ? pos_shape / rate_ : 0.0;
        }
    }

    [[nodiscard]] double intensity() const { return rate_; }
    [[nodiscard]] double compensator_shift() const { return shift_; }
    [[nodiscard]] double epsilon() const { return epsilon_; }

    [[nodiscard]] JumpRecord sample(double horizon, RngStream& rng) const {
        JumpRecord rec;
        rec.truncation_epsilon = epsilon_;
        rec.compensator_shift = shift_;
        const auto n = detail::sample_poisson(rate_ * horizon, rng);
        if (n == 0) {
            return rec;
        }
        auto times = detail::sorted_uniform_times(n, horizon, rng);
        rec.times.reserve(n);
        rec.sizes.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double y = draw_size(rng);
            if (std::abs(y) > epsilon_ && y != 0.0) {
                rec.times.push_back(times[i]);
                rec.sizes.push_back(y);
            }
        }
        return rec;
    }

private:
    double draw_size(RngStream& rng) const {
        if (cp_) {
            return sample_jump_size(cp_->jumps, rng);
        }
        const bool positive = rng.uniform() < p_pos_;
        const auto& side = positive ? pos_ : neg_;
        const double a = side->draw_abs(rng);
        return positive ? a : -a;
    }

    double side_mass(const LevyMeasure& nu, double sign) const {
        const double lower = sign > 0.0 ? 0.0 : -kInfinity;
        const double upper = sign > 0.0 ? kInfinity : 0.0;
        return detail::integrate_line([&nu](double y) { return density_at(nu, y); },
                                      breakpoints(nu), false, epsilon_, lower, upper)
            .value;
    }

    std::optional<detail::SideShape> build_side(const LevyMeasure& nu, double sign,
                                                double extent) const {
        if (!(extent > epsilon_)) {
            return std::nullopt;
        }
        std::vector<double> knots;
        if (const auto* tab = nu.as<TabulatedMeasure>()) {
            const auto& side = sign > 0.0 ? tab->positive : tab->negative;
            if (!side.table) {
                return std::nullopt;
            }
            const double lo = epsilon_ > 0.0 ? epsilon_ : side.table->knots().front();
            knots.push_back(lo);
            for (double k : side.table->knots()) {
                if (k > lo) {
                    knots.push_back(k);
                }
            }
        } else {
            const double lo = epsilon_ > 0.0 ? epsilon_ : 1e-12;
            const double hi = std::max(extent, 2.0 * lo);
            const double step = std::log(hi / lo) / static_cast<double>(kSamplerKnots - 1);
            for (std::size_t i = 0; i < kSamplerKnots; ++i) {
                knots.push_back(lo * std::exp(step * static_cast<double>(i)));
            }
            knots.back() = hi;
        }
        if (knots.size() < 2) {
            return std::nullopt;
        }
        std::vector<double> values;
        values.reserve(knots.size());
        for (double k : knots) {
            values.push_back(density_at(nu, sign * k));
        }
        detail::SideShape shape;
        shape.table = PiecewiseDensity(knots, std::move(values));
        shape.lo = knots.front();
        if (epsilon_ == 0.0) {
            // finite activity: continue the innermost power law to the origin
            double p = 0.0;
            if (const auto* tab = nu.as<TabulatedMeasure>()) {
                const auto& side = sign > 0.0 ? tab->positive : tab->negative;
                p = side.extrapolates ? side.inner_exponent : 0.0;
                shape.inner_mass = side.inner_mass();
            } else {
                p = shape.table.is_power_cell(0) ? shape.table.cell_exponent(0) : 0.0;
                const double v0 = shape.table.values().front();
                shape.inner_mass = p > -1.0 ? v0 * shape.lo / (p + 1.0) : kInfinity;
            }
            if (std::isinf(shape.inner_mass)) {
                fail(ErrorKind::DivergentMass, "measure has infinite mass near the origin");
            }
            shape.inner_exponent = p;
        }
        if (!(shape.mass() > 0.0)) {
            return std::nullopt;
        }
        return shape;
    }

    double epsilon_ = 0.0;
    double rate_ = 0.0;
    double shift_ = 0.0;
    double p_pos_ = 0.0;
    std::optional<CompoundPoisson> cp_;
    std::optional<detail::SideShape> neg_;
    std::optional<detail::SideShape> pos_;
};

/// Exact compound Poisson path on (0, T].
inline JumpRecord sample_compound_poisson(const LevyMeasure& nu, double horizon, RngStream& rng) {
    if (nu.as<CompoundPoisson>() == nullptr && !nu.is_zero()) {
        fail(ErrorKind::InvalidArgument, "sample_compound_poisson needs a compound Poisson measure");
    }
    return JumpSampler(nu, 0.0).sample(horizon, rng);
}

/// Jumps with |y| > epsilon of an arbitrary measure on (0, T].
inline JumpRecord sample_truncated_jumps(const LevyMeasure& nu, double epsilon, double horizon,
                                         RngStream& rng) {
    if (!(epsilon > 0.0) && std::isinf(total_mass(nu))) {
        fail(ErrorKind::DivergentMass, "infinite-activity measure needs a truncation epsilon > 0");
    }
    return JumpSampler(nu, epsilon).sample(horizon, rng);
}

/// C_T under the second process: N(-xi^2/2, xi^2).
inline double sample_C_T(double xi_sq_value, RngStream& rng) {
    if (xi_sq_value == 0.0) {
        return 0.0;
    }
    return -0.5 * xi_sq_value + std::sqrt(xi_sq_value) * rng.normal();
}

inline double sample_C_T(const ProblemSpec& spec, RngStream& rng) {
    return sample_C_T(xi_sq(spec), rng);
}

/// Terminal value X_T of a single process: exact Gaussian continuous part
/// plus the (possibly truncated) compensated jump part.
class TerminalSampler {
public:
    TerminalSampler(const ProcessSpec& p, double horizon, double epsilon = 0.0,
                    bool small_jump_correction = false)
        : horizon_(horizon),
          drift_(p.drift.integral(0.0, horizon)),
          jumps_(p.levy, epsilon) {
        double var = p.vol_sq.integral(0.0, horizon);
        if (small_jump_correction && epsilon > 0.0) {
            var += horizon * small_jump_second_moment(p.levy, epsilon);
        }
        sd_ = std::sqrt(std::max(var, 0.0));
    }

    [[nodiscard]] double sample(RngStream& jump_rng, RngStream& gauss_rng) const {
        const double gauss = sd_ > 0.0 ? sd_ * gauss_rng.normal() : 0.0;
        return drift_ + gauss + jumps_.sample(horizon_, jump_rng).terminal_value(horizon_);
    }

    [[nodiscard]] const JumpSampler& jumps() const { return jumps_; }

private:
    double horizon_;
    double drift_;
    double sd_ = 0.0;
    JumpSampler jumps_;
};

/// Debug dump: one row per jump, header mandatory.
inline void write_paths_csv(std::ostream& os, const std::vector<JumpRecord>& paths) {
    os << "path_id,jump_time,jump_size\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = 0; j < paths[i].count(); ++j) {
            os << i << ',' << paths[i].times[j] << ',' << paths[i].sizes[j] << '\n';
        }
    }
    os.precision(old);
}

}  // namespace addgap
