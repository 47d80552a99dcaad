#pragma once

#include <stdexcept>
#include <string>

namespace beltrami {

/// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operands live on different grids.
struct SizeMismatch : Error {
    using Error::Error;
};

/// A field that must be divergence-free is not (beyond tolerance).
struct NotSolenoidal : Error {
    using Error::Error;
};

/// Vector potential requested for a field with a nonzero mean component.
struct NonzeroMean : Error {
    using Error::Error;
};

/// (alpha - beta)^2 < 4: the characteristic roots are complex.
struct ComplexRoots : Error {
    using Error::Error;
};

/// No integer lattice vector k satisfies |k|^2 = n.
struct EmptyShell : Error {
    using Error::Error;
};

/// Non-finite values appeared in the state during time integration.
struct BlowupDetected : Error {
    double t;
    explicit BlowupDetected(double time)
        : Error("non-finite state detected at t = " + std::to_string(time)), t(time) {}
};

/// The configured time step violates the stability bound mid-run.
struct StabilityViolated : Error {
    using Error::Error;
};

/// Constraint targets cannot be met from any admissible iterate.
struct InfeasibleTargets : Error {
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed checkpoint file or header mismatch.
struct CheckpointError : Error {
    using Error::Error;
};

} // namespace beltrami
