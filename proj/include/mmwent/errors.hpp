#pragma once

#include <stdexcept>
#include <string>

namespace mmwent {

// Domain failures that callers may want to tell apart. Plain argument
// validation uses std::invalid_argument.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Covariance matrix has no real smallest symplectic eigenvalue.
struct NonPhysicalCM : Error {
    using Error::Error;
};

/// Truncated state lost more than 1% of its probability.
struct TruncationTooSmall : Error {
    using Error::Error;
};

/// Kraus set is not complete enough on the kept input subspace.
struct CutoffInsufficient : Error {
    using Error::Error;
};

/// Cutoff doubling failed to settle the log-negativity.
struct NonConverged : Error {
    using Error::Error;
};

struct FrequencyOutOfModelRange : Error {
    using Error::Error;
};

/// Vacuum-limited or lossless link: the entanglement never breaks.
struct NoBreakingDistance : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace mmwent
