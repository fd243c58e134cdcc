#pragma once

#include <stdexcept>
#include <string>

namespace rydberg {

// Each error category maps onto one stable CLI exit code (see exit_code()).

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FramingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for results that are not representable as a finite number
/// (infinite capacity, degenerate pilots, undefined PAPR).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Splitting too small to resolve two peaks.
struct UnsplitSpectrumError : NumericalError {
    using NumericalError::NumericalError;
};

/// More than two qualifying peaks.
struct MalformedSpectrumError : NumericalError {
    using NumericalError::NumericalError;
};

enum class ExitCode : int {
    Success = 0,
    ConfigError = 2,
    EnvironmentError = 3,
    NumericalError = 4,
};

}  // namespace rydberg
