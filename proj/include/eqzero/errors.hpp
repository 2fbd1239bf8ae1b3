#pragma once

#include <stdexcept>
#include <string>

namespace eqzero {

// Exception taxonomy shared across the library.  Every failure mode the
// solvers can signal maps to one of these; the CLI translates them into
// exit codes (see cli.hpp).

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureTooCoarse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateBoundary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MapInversionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WeightNotPositive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridTooCoarse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientStatistics : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NearDiagonal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace eqzero
