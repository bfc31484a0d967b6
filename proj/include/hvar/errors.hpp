#pragma once

#include <stdexcept>
#include <string>

namespace hvar {

/// Bad configuration or violated precondition (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Base for numerical failures (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// det DT_t <= 0 at some evaluation point: the deformation folds at this t.
struct NonPositiveJacobian : NumericalError {
    NonPositiveJacobian(double t_, double a_, double x, double y)
        : NumericalError("non-positive Jacobian det " + std::to_string(a_) +
                         " at t=" + std::to_string(t_) + ", x=(" + std::to_string(x) +
                         "," + std::to_string(y) + ")"),
          t(t_), a(a_) {}
    double t;
    double a;
};

/// An integrated flow trajectory left the evaluator's domain.
struct TrajectoryEscape : NumericalError {
    using NumericalError::NumericalError;
};

/// A field handed to a specialized variation assembly does not belong to
/// the claimed category (e.g. nonzero divergence for a solenoidal assembly).
struct CategoryMismatch : NumericalError {
    using NumericalError::NumericalError;
};

/// Operation not defined for this deformation family.
struct UnsupportedFamily : ConfigError {
    using ConfigError::ConfigError;
};

/// Eigensolver did not reach the residual tolerance within its budget.
struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};

/// The bordered corrector system is numerically singular (gap too small).
struct SingularSystem : NumericalError {
    using NumericalError::NumericalError;
};

/// Mass matrix lost positivity (mesh defect).
struct SingularMass : NumericalError {
    using NumericalError::NumericalError;
};

/// An operation restricted to the first mode was applied to a higher one.
struct ModeMismatch : ConfigError {
    using ConfigError::ConfigError;
};

/// First eigenfunction is not radially symmetric to tolerance.
struct RadialSymmetryViolated : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace hvar
