// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lagflow {

/// Base class for all library failures.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad argument / configuration value.
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// A structural invariant of a data type does not hold (open mesh, wrong genus, ...).
class InvariantViolation : public Error {
  public:
    using Error::Error;
};

/// Data fails a solvability condition (nonzero mean Neumann flux, volume mismatch, ...).
class CompatibilityError : public Error {
  public:
    using Error::Error;
};

/// Least-squares system too ill-conditioned to trust.
class ConditioningError : public Error {
  public:
    ConditioningError(const std::string& msg, double condition_number)
        : Error(msg), condition_number(condition_number) {}
    double condition_number;
};

/// Trajectory integration produced non-finite values or a degenerate mesh.
class BlowUpError : public Error {
  public:
    BlowUpError(const std::string& msg, double time, long marker = -1)
        : Error(msg), time(time), marker(marker) {}
    double time;
    long marker;  // offending marker/vertex index, -1 if not applicable
};

/// Geometric precondition violated (tube exits the domain, R too small, ...).
class GeometryError : public Error {
  public:
    GeometryError(const std::string& msg, double time = 0.0) : Error(msg), time(time) {}
    double time;
};

/// Iteration failed to converge; carries the residual history.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& msg, std::vector<double> residuals)
        : Error(msg), residuals(std::move(residuals)) {}
    std::vector<double> residuals;
};

/// An iterate left the admissible ball X_nu around the potential control.
class BallViolationError : public Error {
  public:
    BallViolationError(const std::string& msg, double distance, double radius)
        : Error(msg), distance(distance), radius(radius) {}
    double distance;
    double radius;
};

/// A diagnostic audit (Gronwall bound, containment) failed.
class AuditFailure : public Error {
  public:
    using Error::Error;
};

}  // namespace lagflow
