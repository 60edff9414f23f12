#pragma once

#include <stdexcept>
#include <string>

namespace laplace {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
struct DomainError : NumericsError {
    using NumericsError::NumericsError;
};

// An integrand returned NaN/Inf at a quadrature node (after one inward nudge).
struct NonFiniteEvaluation : NumericsError {
    double at;
    explicit NonFiniteEvaluation(double x)
        : NumericsError("integrand evaluated to a non-finite value at x = " + std::to_string(x)),
          at(x) {}
};

// Adaptive subdivision hit its panel cap before reaching the requested tolerance.
struct ToleranceNotMet : NumericsError {
    double achieved;
    ToleranceNotMet(const std::string& what, double achieved_error)
        : NumericsError(what), achieved(achieved_error) {}
};

struct DepthTooLarge : DomainError {
    using DomainError::DomainError;
};

struct NoWitnessAtDepth : NumericsError {
    using NumericsError::NumericsError;
};

struct DomainTooSmall : DomainError {
    using DomainError::DomainError;
};

struct NoRootBracketed : NumericsError {
    using NumericsError::NumericsError;
};

struct ConsistencyError : NumericsError {
    using NumericsError::NumericsError;
};

struct DegenerateStep : NumericsError {
    using NumericsError::NumericsError;
};

struct MaxIterExceeded : NumericsError {
    using NumericsError::NumericsError;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace laplace
