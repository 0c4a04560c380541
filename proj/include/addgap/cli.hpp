// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the addgap executable. Kept in the library
// so tests can drive them without spawning processes.
#pragma once

#include "addgap/bounds.hpp"
#include "addgap/config.hpp"
#include "addgap/error.hpp"
#include "addgap/montecarlo.hpp"
#include "addgap/simulate.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace addgap::cli {

using namespace addgap::config;

enum ExitCode : int { kOk = 0, kConfigError = 1, kNoApplicableBound = 2 };

inline constexpr const char* kSweepHeader =
    "value,l1_nu,hellinger_sq,xi_sq,thm1,thm2,simple_sqrt,gaussian_exact,estimate,half_width";

struct Options {
    std::string command;
    std::string config_path;
    bool json = false;
    std::optional<std::uint64_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::string check = "tv";
    std::optional<std::string> out;
    std::optional<std::string> param;
    std::optional<double> from;
    std::optional<double> to;
    std::optional<std::uint64_t> steps;
    std::optional<std::string> dump_paths;  // estimate: jump records of the first paths
    std::uint64_t dump_count = 100;
    unsigned threads = 0;
};

namespace detail {

inline std::string fmt(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0.0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_short(double x) {
    if (!std::isfinite(x)) {
        return fmt(x);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& x) { return x ? fmt_short(*x) : "n/a"; }

inline void row(std::ostream& os, const std::string& label, const std::string& value) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-26s %s\n", label.c_str(), value.c_str());
    os << buf;
}

inline EstimatorSettings estimator_settings(const ExperimentConfig& cfg, const Options& o) {
    auto s = cfg.estimator.value_or(EstimatorSettings{});
    if (o.paths) {
        s.n_paths = *o.paths;
    }
    if (o.seed) {
        s.seed = *o.seed;
    }
    if (o.epsilon) {
        s.epsilon = *o.epsilon;
    }
    if (s.n_paths == 0) {
        fail(ErrorKind::InvalidArgument, "--paths must be > 0");
    }
    return s;
}

inline void print_bound_table(std::ostream& os, const BoundReport& rep) {
    const auto& ing = rep.ingredients;
    row(os, "horizon", fmt_short(ing.horizon));
    row(os, "sigma^2 regime", ing.regime == VolRegime::Positive ? "positive" : "zero");
    row(os, "sigma mismatch", ing.sigma_mismatch ? "yes" : "no");
    row(os, "absolutely continuous", ing.abs_continuous ? "yes" : "no");
    row(os, "L1(nu1, nu2)", fmt_opt(ing.l1_nu));
    row(os, "H2(nu1, nu2)", fmt_opt(ing.hellinger_sq_nu));
    row(os, "gamma1", fmt_opt(ing.gamma1));
    row(os, "gamma2", fmt_opt(ing.gamma2));
    row(os, "eta", fmt_opt(ing.eta));
    row(os, "xi^2", fmt_opt(ing.xi_sq));
    if (ing.drift) {
        row(os, "drift match", (ing.drift->ok ? "ok, sup gap " : "FAILED, sup gap ") +
                                   fmt_short(ing.drift->sup_gap));
    }
    os << '\n';
    const std::pair<const char*, const BoundValue*> bounds[] = {
        {"thm1 (hellinger)", &rep.thm1},
        {"thm2 (sinh)", &rep.thm2},
        {"simple_sqrt", &rep.simple_sqrt},
        {"gaussian_exact", &rep.gaussian_exact},
    };
    for (const auto& [name, b] : bounds) {
        row(os, name, b->applicable() ? fmt_short(*b->raw) : "not applicable: " + b->reason);
    }
    row(os, "best", fmt_short(rep.best) + " (" + rep.best_source + ")");
}

inline int bound_exit_code(const BoundReport& rep) {
    return rep.any_applicable() || rep.ingredients.sigma_mismatch ? kOk : kNoApplicableBound;
}

inline json envelope(const char* command) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

inline void dump_paths(const ExperimentConfig& cfg, const EstimatorSettings& s, const Options& o) {
    std::ofstream f(*o.dump_paths, std::ios::binary);
    if (!f) {
        fail(ErrorKind::ConfigParse, "cannot write '" + *o.dump_paths + "'");
    }
    const auto& spec = cfg.problem;
    const double eps = std::isinf(total_mass(spec.p2.levy)) ? s.epsilon : 0.0;
    const JumpSampler sampler(spec.p2.levy, eps);
    std::vector<JumpRecord> paths;
    for (std::uint64_t i = 0; i < std::min(o.dump_count, s.n_paths); ++i) {
        RngStream rng(s.seed, i, kJumpSubstream);
        paths.push_back(sampler.sample(spec.horizon, rng));
    }
    write_paths_csv(f, paths);
}

}  // namespace detail

inline int cmd_bound(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o.config_path);
    const auto rep = compute_report(cfg.problem);
    if (o.json) {
        auto j = detail::envelope("bound");
        j.update(to_json(rep));
        out << j.dump(2) << '\n';
    } else {
        detail::print_bound_table(out, rep);
    }
    return detail::bound_exit_code(rep);
}

inline int cmd_estimate(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o.config_path);
    const auto s = detail::estimator_settings(cfg, o);
    const RunOptions run{o.threads};
    const auto& spec = cfg.problem;
    auto j = detail::envelope("estimate");
    j["check"] = o.check;
    EstimateResult est;
    if (o.check == "tv") {
        const auto d = diagnose_tv(spec, s.n_paths, s.epsilon, s.seed, run);
        est = d.tv;
        j["estimate"] = to_json(d.tv);
        j["diagnostics"] = {{"positive_part", to_json(d.positive_part)},
                            {"martingale", to_json(d.martingale)},
                            {"inequality_violations", d.inequality_violations},
                            {"sign_violations", d.sign_violations},
                            {"max_split_residual", number_json(d.max_split_residual)}};
    } else if (o.check == "martingale") {
        est = martingale_check(spec, s.n_paths, s.epsilon, s.seed, run);
        j["estimate"] = to_json(est);
        j["target"] = 1.0;
    } else if (o.check == "sinh") {
        est = estimate_sinh_oracle(spec, s.n_paths, s.seed, run);
        j["estimate"] = to_json(est);
        j["target"] = number_json(2.0 * std::sinh(spec.horizon * l1_distance(spec.p1.levy, spec.p2.levy)));
    } else {
        fail(ErrorKind::InvalidArgument, "--check must be tv, martingale or sinh");
    }
    if (o.dump_paths) {
        detail::dump_paths(cfg, s, o);
    }
    const auto rep = compute_report(spec);
    json margins = json::object();
    const std::pair<const char*, const BoundValue*> bounds[] = {
        {"thm1", &rep.thm1},
        {"thm2", &rep.thm2},
        {"simple_sqrt", &rep.simple_sqrt},
        {"gaussian_exact", &rep.gaussian_exact},
    };
    if (o.check == "tv") {
        for (const auto& [name, b] : bounds) {
            margins[name] = b->applicable() ? number_json(*b->raw - est.mean) : json(nullptr);
        }
        j["margins"] = margins;
    }
    if (o.json) {
        out << j.dump(2) << '\n';
        return kOk;
    }
    detail::row(out, "check", o.check);
    detail::row(out, "estimate", detail::fmt_short(est.mean) + " +/- " +
                                     detail::fmt_short(est.half_width_95) + " (95%)");
    detail::row(out, "paths", std::to_string(est.n_paths));
    detail::row(out, "seed", std::to_string(est.seed));
    if (est.truncated_proxy) {
        detail::row(out, "note", "truncated proxy (epsilon = " + detail::fmt_short(est.truncation_epsilon) + ")");
    }
    if (j.contains("target")) {
        detail::row(out, "target", j["target"].is_number() ? detail::fmt_short(j["target"].get<double>())
                                                           : j["target"].dump());
    }
    if (o.check == "tv") {
        for (const auto& [name, b] : bounds) {
            detail::row(out, std::string("margin ") + name,
                        b->applicable() ? detail::fmt_short(*b->raw - est.mean) : "n/a");
        }
    }
    return kOk;
}

/// Bounds next to the estimated distance: how loose is each bound?
inline int cmd_compare(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o.config_path);
    const auto s = detail::estimator_settings(cfg, o);
    const auto rep = compute_report(cfg.problem);
    const auto est = estimate_tv(cfg.problem, s.n_paths, s.epsilon, s.seed, RunOptions{o.threads});
    const std::pair<const char*, const BoundValue*> bounds[] = {
        {"thm1", &rep.thm1},
        {"thm2", &rep.thm2},
        {"simple_sqrt", &rep.simple_sqrt},
        {"gaussian_exact", &rep.gaussian_exact},
    };
    if (o.json) {
        auto j = detail::envelope("compare");
        j.update(to_json(rep));
        j["estimate"] = to_json(est);
        json rows = json::object();
        for (const auto& [name, b] : bounds) {
            if (!b->applicable()) {
                rows[name] = nullptr;
                continue;
            }
            const double v = b->clamped();
            rows[name] = {{"clamped", number_json(v)},
                          {"gap", number_json(v - est.mean)},
                          {"ratio", est.mean > 0.0 ? number_json(v / est.mean) : json(nullptr)},
                          {"consistent", v + 4.0 * est.half_width_95 >= est.mean}};
        }
        j["comparison"] = rows;
        out << j.dump(2) << '\n';
    } else {
        detail::row(out, "estimate", detail::fmt_short(est.mean) + " +/- " +
                                         detail::fmt_short(est.half_width_95) + " (95%)");
        if (est.truncated_proxy) {
            detail::row(out, "note", "truncated proxy (epsilon = " + detail::fmt_short(est.truncation_epsilon) + ")");
        }
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-16s %14s %14s %10s\n", "bound", "value", "gap", "ratio");
        out << buf;
        for (const auto& [name, b] : bounds) {
            if (!b->applicable()) {
                std::snprintf(buf, sizeof buf, "%-16s %s\n", name, ("n/a (" + b->reason + ")").c_str());
            } else {
                const double v = b->clamped();
                std::snprintf(buf, sizeof buf, "%-16s %14.6g %14.6g %10s\n", name, v, v - est.mean,
                              est.mean > 0.0 ? detail::fmt_short(v / est.mean).c_str() : "n/a");
            }
            out << buf;
        }
    }
    return detail::bound_exit_code(rep);
}

namespace detail {

inline std::string csv_opt(const std::optional<double>& x) { return x ? fmt(*x) : "NA"; }
inline std::string csv_bound(const BoundValue& b) { return b.applicable() ? fmt(*b.raw) : "NA"; }

}  // namespace detail

/// One CSV row per sweep point. The estimate columns are filled when the
/// config has an estimator block or --paths is given.
inline int cmd_sweep(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o.config_path);
    SweepSettings sw = cfg.sweep.value_or(SweepSettings{});
    if (o.param) sw.param = *o.param;
    if (o.from) sw.from = *o.from;
    if (o.to) sw.to = *o.to;
    if (o.steps) sw.steps = *o.steps;
    if (sw.param.empty()) {
        fail(ErrorKind::UnknownParameterPath, "no sweep parameter given (--param or sweep.param)");
    }
    if (sw.steps == 0) {
        fail(ErrorKind::InvalidArgument, "--steps must be > 0");
    }
    const bool with_estimate = cfg.estimator.has_value() || o.paths.has_value();

    std::ofstream file;
    std::ostream* sink = &out;
    if (o.out) {
        file.open(*o.out, std::ios::binary);
        if (!file) {
            fail(ErrorKind::ConfigParse, "cannot write '" + *o.out + "'");
        }
        sink = &file;
    }
    *sink << kSweepHeader << '\n';
    for (std::uint64_t k = 0; k < sw.steps; ++k) {
        const double value =
            sw.steps == 1 ? sw.from
                          : sw.from + (sw.to - sw.from) * static_cast<double>(k) /
                                          static_cast<double>(sw.steps - 1);
        const auto point = parse_config(with_parameter(cfg.raw, sw.param, value));
        const auto rep = compute_report(point.problem);
        std::string est = "NA";
        std::string hw = "NA";
        if (with_estimate) {
            // Per point, so sweeping an estimator field takes effect.
            const auto settings = detail::estimator_settings(point, o);
            try {
                const auto e = estimate_tv(point.problem, settings.n_paths, settings.epsilon,
                                           settings.seed, RunOptions{o.threads});
                est = detail::fmt(e.mean);
                hw = detail::fmt(e.half_width_95);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::HypothesisFailed) throw;
            }
        }
        const auto& ing = rep.ingredients;
        *sink << detail::fmt(value) << ',' << detail::csv_opt(ing.l1_nu) << ','
              << detail::csv_opt(ing.hellinger_sq_nu) << ',' << detail::csv_opt(ing.xi_sq) << ','
              << detail::csv_bound(rep.thm1) << ',' << detail::csv_bound(rep.thm2) << ','
              << detail::csv_bound(rep.simple_sqrt) << ',' << detail::csv_bound(rep.gaussian_exact)
              << ',' << est << ',' << hw << '\n';
    }
    return kOk;
}

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::HypothesisFailed:
        case ErrorKind::NotAbsolutelyContinuous:
        case ErrorKind::RatioUndefined:
        case ErrorKind::ZeroVolatility:
        case ErrorKind::NotGaussianCase:
            return kNoApplicableBound;
        default:
            return kConfigError;
    }
}

/// Dispatches a command; errors are reported on `err` and mapped to exit codes.
inline int run(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        if (o.command == "sweep") return cmd_sweep(o, out);
        std::ofstream file;
        std::ostream* sink = &out;
        if (o.out) {
            file.open(*o.out, std::ios::binary);
            if (!file) {
                fail(ErrorKind::ConfigParse, "cannot write '" + *o.out + "'");
            }
            sink = &file;
        }
        if (o.command == "bound") return cmd_bound(o, *sink);
        if (o.command == "estimate") return cmd_estimate(o, *sink);
        if (o.command == "compare") return cmd_compare(o, *sink);
        err << "error: unknown command '" << o.command << "'\n";
        return kConfigError;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace addgap::cli
