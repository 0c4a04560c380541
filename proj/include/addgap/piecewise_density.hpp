// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "addgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace addgap {

/// Nonnegative density tabulated on sorted knots and zero outside them.
///
/// A cell whose endpoints share a sign and carry positive values is
/// interpolated as a power law, v0 * (y / y0)^p, which is log-linear in |y|
/// and reproduces y^(-1-alpha) shapes exactly. Any other cell (one touching a
/// zero value, or straddling the origin) is interpolated linearly. Cell
/// masses and the inverse CDF are closed form in both cases.
class PiecewiseDensity {
public:
    PiecewiseDensity() = default;

    PiecewiseDensity(std::vector<double> knots, std::vector<double> values)
        : knots_(std::move(knots)), values_(std::move(values)) {
        if (knots_.size() < 2 || knots_.size() != values_.size()) {
            fail(ErrorKind::InvalidArgument,
                 "tabulated density needs at least two knots and one value per knot");
        }
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]) || values_[i] < 0.0) {
                fail(ErrorKind::InvalidArgument,
                     "tabulated density knots must be finite and values finite and nonnegative");
            }
            if (i > 0 && !(knots_[i] > knots_[i - 1])) {
                fail(ErrorKind::InvalidArgument, "tabulated density knots must be strictly increasing");
            }
        }
        const std::size_t cells = knots_.size() - 1;
        exponent_.assign(cells, 0.0);
        power_.assign(cells, false);
        cumulative_.assign(knots_.size(), 0.0);
        for (std::size_t i = 0; i < cells; ++i) {
            const double y0 = knots_[i];
            const double y1 = knots_[i + 1];
            if (values_[i] > 0.0 && values_[i + 1] > 0.0 && y0 * y1 > 0.0) {
                power_[i] = true;
                exponent_[i] = std::log(values_[i + 1] / values_[i]) / std::log(y1 / y0);
            }
            cumulative_[i + 1] = cumulative_[i] + cell_mass(i);
        }
    }

    [[nodiscard]] double operator()(double y) const {
        if (!(y >= knots_.front() && y <= knots_.back())) {
            return 0.0;
        }
        const std::size_t i = cell_of(y);
        const double y0 = knots_[i];
        if (power_[i]) {
            return values_[i] * std::pow(y / y0, exponent_[i]);
        }
        const double h = knots_[i + 1] - y0;
        return values_[i] + (values_[i + 1] - values_[i]) * (y - y0) / h;
    }

    [[nodiscard]] double mass() const { return cumulative_.back(); }

    /// Inverse CDF of the normalized density; u in [0, 1].
    [[nodiscard]] double quantile(double u) const {
        const double target = std::clamp(u, 0.0, 1.0) * mass();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        std::size_t i = it == cumulative_.begin()
                            ? 0
                            : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        i = std::min(i, knots_.size() - 2);
        // skip empty cells so the draw lands where mass lives
        while (i + 1 < knots_.size() - 1 && cumulative_[i + 1] <= target &&
               cumulative_[i + 1] == cumulative_[i]) {
            ++i;
        }
        const double local = std::max(0.0, target - cumulative_[i]);
        const double y0 = knots_[i];
        const double y1 = knots_[i + 1];
        double y;
        if (power_[i]) {
            const double q = exponent_[i] + 1.0;
            const double scale = values_[i] * y0;
            const double z = local / scale;
            const double log_ratio = std::abs(q) < 1e-12 ? z : std::log1p(q * z) / q;
            y = y0 * std::exp(log_ratio);
        } else {
            const double h = y1 - y0;
            const double a = 0.5 * (values_[i + 1] - values_[i]) / h;
            const double b = values_[i];
            const double disc = std::sqrt(std::max(0.0, b * b + 4.0 * a * local));
            y = (b + disc) > 0.0 ? y0 + 2.0 * local / (b + disc) : y0;
        }
        return std::clamp(y, std::min(y0, y1), std::max(y0, y1));
    }

    [[nodiscard]] const std::vector<double>& knots() const { return knots_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] bool is_power_cell(std::size_t i) const { return power_.at(i); }
    [[nodiscard]] double cell_exponent(std::size_t i) const { return exponent_.at(i); }

    [[nodiscard]] PiecewiseDensity scaled(double factor) const {
        std::vector<double> v = values_;
        for (double& x : v) {
            x *= factor;
        }
        return {knots_, std::move(v)};
    }

    friend bool operator==(const PiecewiseDensity& a, const PiecewiseDensity& b) {
        return a.knots_ == b.knots_ && a.values_ == b.values_;
    }

private:
    [[nodiscard]] std::size_t cell_of(double y) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
        std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
        return std::min(i, knots_.size() - 2);
    }

    [[nodiscard]] double cell_mass(std::size_t i) const {
        const double y0 = knots_[i];
        const double y1 = knots_[i + 1];
        if (power_[i]) {
            const double q = exponent_[i] + 1.0;
            const double log_r = std::log(y1 / y0);
            const double factor = std::abs(q * log_r) < 1e-12 ? log_r : std::expm1(q * log_r) / q;
            return values_[i] * y0 * factor;
        }
        return 0.5 * (values_[i] + values_[i + 1]) * (y1 - y0);
    }

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> exponent_;
    std::vector<bool> power_;
    std::vector<double> cumulative_;
};

}  // namespace addgap
