/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace iondet {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands have incompatible or invalid dimensions.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A matrix required to be positive semidefinite has a negative eigenvalue
/// beyond tolerance.
class NotPositive : public Error {
public:
  using Error::Error;
};

/// Normalization was requested for an operator with (numerically) zero trace.
class ZeroTrace : public Error {
public:
  using Error::Error;
};

/// An analytic eigenvector formula was evaluated at an eigenvalue that
/// collides with a pole (a grid energy or a discrete level).
class PoleCollision : public Error {
public:
  using Error::Error;
};

/// The two-level coefficient formulas are singular at zero ground-level
/// coupling; the single-level path must be used instead.
class ZeroCoupling : public Error {
public:
  using Error::Error;
};

/// Conditioning was requested on an outcome of (numerically) zero probability.
class ZeroProbabilityBranch : public Error {
public:
  using Error::Error;
};

/// The dense eigensolver failed to converge.
class ConvergenceFailure : public Error {
public:
  using Error::Error;
};

/// An argument that must be a density operator is not one.
class NotDensityOperator : public Error {
public:
  using Error::Error;
};

/// A closed form that is only valid under a stated approximation was invoked
/// outside its regime of validity.
class AssumptionViolated : public Error {
public:
  using Error::Error;
};

/// A scenario configuration is malformed or inconsistent.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A precondition on an operation's arguments is violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

} // namespace iondet
