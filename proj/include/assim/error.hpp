#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace assim {

enum class ErrorCode {
    // table / input validation
    NegativeAudience,
    EmptyTable,
    TotalMismatch,
    DuplicateInterest,
    InvalidPopulation,
    EmptyIntersection,
    ParseError,
    IoError,
    // provider
    ProviderUnavailable,
    ContractViolation,
    InvalidConfig,
    // method
    ZeroTotalAudience,
    NoDistinctiveInterests,
    EmptyScores,
    InvalidK,
    InvalidTriple,
    // analysis
    SizeExceedsUniverse,
    InvalidSizeSpec,
    MissingArea,
    NonPositiveArea,
    LengthMismatch,
    RegionMismatch,
    ConstantSeries,
    // synth
    DegenerateDraw,
    InvalidAlpha,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this type. The code is
// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace assim
