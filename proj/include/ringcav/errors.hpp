// Exception hierarchy shared by all tiers

#pragma once

#include <stdexcept>
#include <string>

namespace ringcav {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No trap exists (u0 = 0 or eta = 0) but a trap-dependent quantity was requested.
struct UntrappedError : Error {
    using Error::Error;
};

// Cavity detuned to the heating side (delta >= 0).
struct HeatingRegimeError : Error {
    using Error::Error;
};

// Singular moment system: no stationary solution.
struct NoSteadyStateError : Error {
    using Error::Error;
};

struct IntegrationError : Error {
    IntegrationError(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

// Hilbert-space cutoff cannot represent the requested state or model.
struct TruncationError : Error {
    using Error::Error;
};

// Problem size exceeds what a dense oracle is allowed to handle.
struct GuardError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace ringcav
