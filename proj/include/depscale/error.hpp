#ifndef DEPSCALE_ERROR_HPP
#define DEPSCALE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace depscale {

enum class ErrorCode {
    NegativeEntry,
    NotNormalized,
    ZeroMarginal,
    InvalidDistribution,
    InvalidPartition,
    InvalidArgument,
    SvdFailure,
    NonConvergence,
    NotPositiveDefinite,
    InvalidBlock,
    NotScalar,
    NegativeConditional,
    ComponentNotCentered,
    TooFewSamples,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::ZeroMarginal: return "ZeroMarginal";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::InvalidPartition: return "InvalidPartition";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SvdFailure: return "SvdFailure";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::InvalidBlock: return "InvalidBlock";
        case ErrorCode::NotScalar: return "NotScalar";
        case ErrorCode::NegativeConditional: return "NegativeConditional";
        case ErrorCode::ComponentNotCentered: return "ComponentNotCentered";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Numerical failures (SVD, non-converged ascent) map to exit code 3 in the
/// CLI; everything else is an input error.
constexpr bool is_numerical(ErrorCode code) noexcept {
    return code == ErrorCode::SvdFailure || code == ErrorCode::NonConvergence;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace depscale

#endif  // DEPSCALE_ERROR_HPP
