#pragma once

#include <stdexcept>

namespace mvi {

// Validation failure; the message lists every violated constraint.
struct InvalidParam : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A count argument (particles, paths, grid points) is out of range.
struct BadCount : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A simulated quantity became NaN or infinite.
struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trajectory and increment sequences have inconsistent lengths.
struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Intervention rejected by the admissibility predicate.
struct Inadmissible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Intervention operator evaluated where no impulse is admissible (u <= c).
struct NoAdmissibleImpulse : std::domain_error {
    using std::domain_error::domain_error;
};

// Characteristic equation has no usable root in the requested regime.
struct NoRoot : std::domain_error {
    using std::domain_error::domain_error;
};

// alpha0 == rho: outside both solvable cases, rejected rather than guessed.
struct BoundaryCase : std::domain_error {
    using std::domain_error::domain_error;
};

// Hitting-time oracle queried with start above the barrier.
struct BadBarrier : std::domain_error {
    using std::domain_error::domain_error;
};

// Configuration file problem (missing key, unknown key, unparsable value).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mvi
