#pragma once

#include <stdexcept>
#include <string>

namespace sdq {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument to a library operation (bad rule coefficients, M < 1, ...).
struct ArgumentError : Error {
    using Error::Error;
};

// State norm exceeded the configured blow-up bound during a run.
struct DivergenceError : Error {
    long long step;
    DivergenceError(const std::string& msg, long long at_step)
        : Error(msg), step(at_step) {}
};

// Not enough samples to populate a grid or an average.
struct UnderSampledError : Error {
    using Error::Error;
};

// Operation requires a certified single tile (multiplicity 1).
struct MultiplicityError : Error {
    using Error::Error;
};

// Operation restricted to a specific modulator order.
struct OrderError : Error {
    using Error::Error;
};

// Tile sections are not connected intervals.
struct ConnectivityError : Error {
    using Error::Error;
};

// Trajectory or sequence too short for the requested lag/window.
struct IndexError : Error {
    using Error::Error;
};
struct LengthError : Error {
    using Error::Error;
};

// Quadrature failed its internal refinement consistency check.
struct QuadratureError : Error {
    using Error::Error;
};

// Input behaves as a rational where an irrational is required.
struct RationalError : Error {
    using Error::Error;
};

// Degenerate data for a fit (zero or negative values on a log scale).
struct DegenerateError : Error {
    using Error::Error;
};

// Integer overflow detected in exact arithmetic.
struct OverflowError : Error {
    using Error::Error;
};

// Configuration file parse/validation failure; carries a line number when known.
struct ConfigError : Error {
    int line;
    explicit ConfigError(const std::string& msg, int at_line = 0)
        : Error(at_line > 0 ? "line " + std::to_string(at_line) + ": " + msg : msg),
          line(at_line) {}
};

}  // namespace sdq
