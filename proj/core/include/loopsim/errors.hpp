#pragma once

#include <stdexcept>
#include <string>

namespace loopsim {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed inputs: bad trajectory parameters, non-monotone spline knots,
/// inconsistent path pairs, out-of-range configuration values.
struct ValidationError : Error {
    using Error::Error;
};

/// Physics-domain violations: quark collision (separation <= 0), wavefunction
/// escaping the simulation box, states that do not fit the grid.
struct DomainError : Error {
    using Error::Error;
};

/// Numerical failures: quadrature that cannot reach the requested tolerance,
/// unstable time stepping, non-identifiable likelihoods.
struct NumericsError : Error {
    using Error::Error;
};

/// Caller broke an operation's precondition (mismatched grids or configs,
/// unnormalized states, step size above the documented bound).
struct ContractError : Error {
    using Error::Error;
};

}  // namespace loopsim
