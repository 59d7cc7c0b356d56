#pragma once

#include <stdexcept>
#include <string>

namespace depthalloc {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument value (out-of-range age, nonpositive diopter, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Bad configuration: unknown keys, unsupported pupil, malformed tables.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Solver failure or timeout. Carries the best incumbent objective and the
// remaining bound gap when a timeout interrupts branch-and-bound.
struct SolverError : Error {
    SolverError(const std::string& what, double incumbent, double gap)
        : Error(what), incumbent_objective(incumbent), bound_gap(gap) {}
    explicit SolverError(const std::string& what)
        : Error(what), incumbent_objective(0.0), bound_gap(0.0) {}
    double incumbent_objective;
    double bound_gap;
};

// File I/O failure.
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace depthalloc
