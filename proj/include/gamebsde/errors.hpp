#pragma once

#include <stdexcept>
#include <string>

namespace gbsde {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field was handed to an operator expecting a different lattice level or size.
class LevelMismatch : public Error {
public:
    using Error::Error;
};

/// Invalid construction parameters (lattice, generator, grids, policies).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A multiplicative factor 1 + C*beta1*dt + C*<beta2, dB> could become non-positive.
/// Refining the time step is the usual fix.
class PositivityViolation : public Error {
public:
    using Error::Error;
};

/// Obstacle exceeds the terminal condition at some terminal node.
class ObstacleViolation : public Error {
public:
    using Error::Error;
};

/// Brute-force enumeration would exceed its combinatorial budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace gbsde
