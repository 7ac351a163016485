// errors.hpp — Exception types mapped to the CLI exit-code contract

#pragma once

#include <stdexcept>
#include <string>

namespace oqs {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated model/state invariant or unparsable input (exit code 2).
struct ValidationError : Error {
    using Error::Error;
};

// Dimension mismatch or dimension-cap overflow (exit code 2).
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};

// Integrator or other numerical failure (exit code 3).
struct NumericalError : Error {
    using Error::Error;
};

// Conditioning on a measurement outcome of (numerically) zero probability.
struct ImpossibleOutcomeError : Error {
    using Error::Error;
};

} // namespace oqs
