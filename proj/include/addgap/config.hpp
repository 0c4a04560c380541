// SPDX-License-Identifier: Apache-2.0
//
// Strict JSON experiment configs and JSON serialization of results.
// Unknown keys are errors: a typo in "lamda" must not silently become a
// default.
#pragma once

#include "addgap/bounds.hpp"
#include "addgap/error.hpp"
#include "addgap/measures.hpp"
#include "addgap/montecarlo.hpp"
#include "addgap/processes.hpp"
#include "addgap/simulate.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace addgap::config {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultPaths = 100000;
inline constexpr std::uint64_t kDefaultSeed = 1;

struct EstimatorSettings {
    std::uint64_t n_paths = kDefaultPaths;
    double epsilon = kDefaultTruncation;
    std::uint64_t seed = kDefaultSeed;
};

struct SweepSettings {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    std::uint64_t steps = 1;
};

struct ExperimentConfig {
    ProblemSpec problem;
    std::optional<EstimatorSettings> estimator;
    std::optional<SweepSettings> sweep;
    json raw;  // the parsed document, kept for parameter sweeps
};

namespace detail {

[[noreturn]] inline void parse_error(const std::string& path, const std::string& what) {
    fail(ErrorKind::ConfigParse, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) {
        parse_error(path, "expected an object");
    }
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : required) {
            known = known || key == k;
        }
        for (const char* k : optional) {
            known = known || key == k;
        }
        if (!known) {
            parse_error(join(path, key), "unknown field");
        }
    }
    for (const char* k : required) {
        if (!j.contains(k)) {
            parse_error(join(path, k), "missing required field");
        }
    }
}

inline double number(const json& j, const std::string& key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_number()) {
        parse_error(join(path, key), "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        parse_error(join(path, key), "expected a finite number");
    }
    return x;
}

inline std::uint64_t count(const json& j, const std::string& key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        parse_error(join(path, key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::vector<double> numbers(const json& j, const std::string& key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_array()) {
        parse_error(join(path, key), "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
            parse_error(join(path, key) + "." + std::to_string(i), "expected a finite number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline std::string text(const json& j, const std::string& key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_string()) {
        parse_error(join(path, key), "expected a string");
    }
    return v.get<std::string>();
}

// Library validation errors become parse errors that name the fragment.
template <class Build>
auto build_at(const std::string& path, const Build& build) {
    try {
        return build();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigParse) {
            throw;
        }
        parse_error(path, e.what());
    }
}

}  // namespace detail

inline JumpDensity parse_jump_density(const json& j, const std::string& path) {
    using namespace detail;
    if (!j.is_object() || !j.contains("family")) {
        parse_error(join(path, "family"), "missing required field");
    }
    const auto family = text(j, "family", path);
    return build_at(path, [&] {
        if (family == "uniform") {
            check_keys(j, path, {"family", "a", "b"});
            return JumpDensity::uniform(number(j, "a", path), number(j, "b", path));
        }
        if (family == "exponential") {
            check_keys(j, path, {"family", "rate"});
            return JumpDensity::exponential(number(j, "rate", path));
        }
        if (family == "normal") {
            check_keys(j, path, {"family", "mean", "variance"});
            return JumpDensity::normal(number(j, "mean", path), number(j, "variance", path));
        }
        if (family == "tabulated") {
            check_keys(j, path, {"family", "grid", "values"});
            return JumpDensity::tabulated(numbers(j, "grid", path), numbers(j, "values", path));
        }
        parse_error(join(path, "family"), "unknown jump family '" + family + "'");
    });
}

inline LevyMeasure parse_levy(const json& j, const std::string& path) {
    using namespace detail;
    if (!j.is_object() || !j.contains("type")) {
        parse_error(join(path, "type"), "missing required field");
    }
    const auto type = text(j, "type", path);
    return build_at(path, [&] {
        if (type == "zero") {
            check_keys(j, path, {"type"});
            return LevyMeasure::zero();
        }
        if (type == "compound_poisson") {
            check_keys(j, path, {"type", "lambda", "jump_density"});
            return LevyMeasure::compound_poisson(
                number(j, "lambda", path),
                parse_jump_density(j.at("jump_density"), join(path, "jump_density")));
        }
        if (type == "tempered_stable") {
            check_keys(j, path,
                       {"type", "c_minus", "c_plus", "lambda_minus", "lambda_plus", "alpha"});
            return LevyMeasure::tempered_stable(
                number(j, "c_minus", path), number(j, "c_plus", path),
                number(j, "lambda_minus", path), number(j, "lambda_plus", path),
                number(j, "alpha", path));
        }
        if (type == "tabulated") {
            check_keys(j, path, {"type", "grid", "values"});
            return LevyMeasure::tabulated(numbers(j, "grid", path), numbers(j, "values", path));
        }
        parse_error(join(path, "type"), "unknown Levy measure type '" + type + "'");
    });
}

inline TimeFunction parse_time_function(const json& j, const std::string& path) {
    using namespace detail;
    if (!j.is_object() || !j.contains("form")) {
        parse_error(join(path, "form"), "missing required field");
    }
    const auto form = text(j, "form", path);
    return build_at(path, [&] {
        if (form == "constant") {
            check_keys(j, path, {"form", "c"});
            return TimeFunction::constant(number(j, "c", path));
        }
        if (form == "polynomial") {
            check_keys(j, path, {"form", "coeffs"});
            return TimeFunction::polynomial(numbers(j, "coeffs", path));
        }
        if (form == "piecewise_constant") {
            check_keys(j, path, {"form", "breaks", "values"});
            return TimeFunction::piecewise_constant(numbers(j, "breaks", path),
                                                    numbers(j, "values", path));
        }
        parse_error(join(path, "form"), "unknown time function form '" + form + "'");
    });
}

inline ProcessSpec parse_process(const json& j, const std::string& path) {
    detail::check_keys(j, path, {"drift", "vol_sq", "levy"});
    return {parse_time_function(j.at("drift"), detail::join(path, "drift")),
            parse_time_function(j.at("vol_sq"), detail::join(path, "vol_sq")),
            parse_levy(j.at("levy"), detail::join(path, "levy"))};
}

inline ExperimentConfig parse_config(const json& j) {
    using namespace detail;
    check_keys(j, "", {"process1", "process2", "horizon"}, {"estimator", "sweep", "description"});
    if (j.contains("description") && !j.at("description").is_string()) {
        parse_error("description", "expected a string");
    }
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.problem.p1 = parse_process(j.at("process1"), "process1");
    cfg.problem.p2 = parse_process(j.at("process2"), "process2");
    cfg.problem.horizon = number(j, "horizon", "");
    if (!(cfg.problem.horizon > 0.0)) {
        parse_error("horizon", "must be > 0");
    }
    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        check_keys(e, "estimator", {}, {"n_paths", "epsilon", "seed"});
        EstimatorSettings s;
        if (e.contains("n_paths")) {
            s.n_paths = count(e, "n_paths", "estimator");
            if (s.n_paths == 0) {
                parse_error("estimator.n_paths", "must be > 0");
            }
        }
        if (e.contains("epsilon")) {
            s.epsilon = number(e, "epsilon", "estimator");
            if (s.epsilon < 0.0) {
                parse_error("estimator.epsilon", "must be >= 0");
            }
        }
        if (e.contains("seed")) {
            s.seed = count(e, "seed", "estimator");
        }
        cfg.estimator = s;
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, "sweep", {"param", "from", "to", "steps"});
        cfg.sweep = SweepSettings{text(s, "param", "sweep"), number(s, "from", "sweep"),
                                  number(s, "to", "sweep"), count(s, "steps", "sweep")};
        if (cfg.sweep->steps == 0) {
            parse_error("sweep.steps", "must be > 0");
        }
    }
    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ConfigParse, std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::ConfigParse, "cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Copy of `doc` with the numeric leaf at dotted `path` set to `value`.
/// Array elements are addressed by index, e.g. process1.drift.coeffs.1.
inline json with_parameter(json doc, const std::string& path, double value) {
    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    bool any = false;
    while (std::getline(ss, part, '.')) {
        any = true;
        if (node->is_object() && node->contains(part)) {
            node = &(*node)[part];
        } else if (node->is_array() && !part.empty() &&
                   part.find_first_not_of("0123456789") == std::string::npos &&
                   std::stoull(part) < node->size()) {
            node = &(*node)[std::stoull(part)];
        } else {
            fail(ErrorKind::UnknownParameterPath, "no parameter at '" + path + "'");
        }
    }
    if (!any || !node->is_number()) {
        fail(ErrorKind::UnknownParameterPath, "'" + path + "' does not address a numeric field");
    }
    if (node->is_number_integer() && value == std::floor(value)) {
        *node = static_cast<std::int64_t>(value);
    } else {
        *node = value;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Finite numbers as numbers; infinities as "inf" / "-inf".
inline json number_json(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0.0 ? "inf" : "-inf";
    }
    return x;
}

inline json optional_json(const std::optional<double>& x) {
    return x ? number_json(*x) : json(nullptr);
}

inline json to_json(const BoundValue& b) {
    json j;
    j["applicable"] = b.applicable();
    if (b.applicable()) {
        j["value"] = number_json(*b.raw);
        j["clamped"] = number_json(b.clamped());
    } else {
        j["reason"] = b.reason;
    }
    return j;
}

inline json to_json(const Ingredients& ing) {
    json j;
    j["horizon"] = number_json(ing.horizon);
    j["sigma_regime"] = ing.regime == VolRegime::Positive ? "positive" : "zero";
    j["sigma_mismatch"] = ing.sigma_mismatch;
    j["absolutely_continuous"] = ing.abs_continuous;
    json v = json::array();
    for (double y : ing.abs_cont_violations) {
        v.push_back(number_json(y));
    }
    j["abs_cont_violations"] = v;
    j["l1_nu"] = optional_json(ing.l1_nu);
    j["l1_nu_finite"] = ing.l1_nu ? json(std::isfinite(*ing.l1_nu)) : json(nullptr);
    j["hellinger_sq_nu"] = optional_json(ing.hellinger_sq_nu);
    j["hellinger_sq_nu_finite"] =
        ing.hellinger_sq_nu ? json(std::isfinite(*ing.hellinger_sq_nu)) : json(nullptr);
    j["gamma1"] = optional_json(ing.gamma1);
    j["gamma2"] = optional_json(ing.gamma2);
    j["eta"] = optional_json(ing.eta);
    j["xi_sq"] = optional_json(ing.xi_sq);
    if (ing.drift) {
        j["drift_match"] = {{"ok", ing.drift->ok}, {"sup_gap", number_json(ing.drift->sup_gap)}};
    } else {
        j["drift_match"] = nullptr;
    }
    j["gaussian_case"] = ing.gaussian_case;
    return j;
}

inline json to_json(const BoundReport& r) {
    json j;
    j["ingredients"] = to_json(r.ingredients);
    j["bounds"] = {{"thm1", to_json(r.thm1)},
                   {"thm2", to_json(r.thm2)},
                   {"simple_sqrt", to_json(r.simple_sqrt)},
                   {"gaussian_exact", to_json(r.gaussian_exact)}};
    j["best"] = number_json(r.best);
    j["best_source"] = r.best_source;
    return j;
}

inline json to_json(const EstimateResult& e) {
    json j;
    j["mean"] = number_json(e.mean);
    j["half_width_95"] = number_json(e.half_width_95);
    j["n_paths"] = e.n_paths;
    j["truncation_epsilon"] = number_json(e.truncation_epsilon);
    j["seed"] = e.seed;
    j["truncated_proxy"] = e.truncated_proxy;
    if (e.truncated_proxy) {
        std::ostringstream label;
        label << "truncated proxy (epsilon = " << e.truncation_epsilon << ")";
        j["label"] = label.str();
    }
    return j;
}

}  // namespace addgap::config
