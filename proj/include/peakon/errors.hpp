#pragma once

#include <stdexcept>
#include <string>

namespace peakon {

/// Base class for all errors raised by the library.
class PeakonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: mismatched lengths, non-finite entries, bad indices.
class InvalidArgument : public PeakonError {
 public:
  using PeakonError::PeakonError;
};

/// Coincident positions, or a kernel too ill-conditioned to invert.
class DegeneracyError : public PeakonError {
 public:
  using PeakonError::PeakonError;
};

/// Combinatorial enumeration would exceed the configured term budget.
class BudgetExceeded : public PeakonError {
 public:
  using PeakonError::PeakonError;
};

/// Input outside the domain of a closed-form expression.
class DomainError : public PeakonError {
 public:
  using PeakonError::PeakonError;
};

/// The adaptive integrator could not continue.
class IntegrationError : public PeakonError {
 public:
  using PeakonError::PeakonError;
};

}  // namespace peakon
