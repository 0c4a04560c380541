// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace addgap {

enum class ErrorKind {
    InvalidArgument,
    NonFiniteIntegrand,
    ToleranceNotMet,
    EvaluationAtZero,
    DivergentIntegral,
    DivergentMass,
    NotAbsolutelyContinuous,
    ZeroVolatility,
    NotGaussianCase,
    HypothesisFailed,
    RatioUndefined,
    ConfigParse,
    UnknownParameterPath,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::EvaluationAtZero: return "EvaluationAtZero";
    case ErrorKind::DivergentIntegral: return "DivergentIntegral";
    case ErrorKind::DivergentMass: return "DivergentMass";
    case ErrorKind::NotAbsolutelyContinuous: return "NotAbsolutelyContinuous";
    case ErrorKind::ZeroVolatility: return "ZeroVolatility";
    case ErrorKind::NotGaussianCase: return "NotGaussianCase";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::RatioUndefined: return "RatioUndefined";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::UnknownParameterPath: return "UnknownParameterPath";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace addgap
