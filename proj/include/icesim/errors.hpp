#pragma once

#include <stdexcept>
#include <string>

namespace icesim {

/// Bad user input: malformed config, out-of-range parameters, non-finite arguments.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A nonlinear solve failed to converge or detected a loss of monotonicity.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The per-cell map stopped being monotone; the time step must shrink.
class TauTooLargeError : public SolverError {
public:
    using SolverError::SolverError;
};

/// A runtime check of a proven inequality or bound failed.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace icesim
