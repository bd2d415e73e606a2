#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gca {

/// Every failure mode the library reports. The CLI maps data/config codes to
/// exit status 1 and numerical codes to exit status 2.
enum class ErrorCode {
    // data / input
    EmptyOverlap,
    WindowOutOfRange,
    YearNotFound,
    EmptySeries,
    InvalidSeries,
    DimensionMismatch,
    UnknownCoefficient,
    UnknownSeries,
    IncompleteScenario,
    MissingAuxiliarySeries,
    NotNested,
    InvalidArgument,
    InvalidPeriod,
    InvalidRss,
    TooFewReplicates,
    ParseError,
    DuplicateYear,
    ConfigError,
    IoError,
    // numerical
    IllConditioned,
    InsufficientData,
    NonConvergence,
    SupportViolation,
    ZeroDenominator,
    NonStationary,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of the numerics (ill-conditioning, non-convergence, ...)
/// as opposed to bad input.
[[nodiscard]] bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace gca
