#pragma once

#include <stdexcept>
#include <string>

namespace bohrlat {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes or algebra shapes disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition (not self-adjoint, not a
/// projection, size limit exceeded, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A finite map table was queried on an input it does not define.
class UndefinedInput : public Error {
 public:
  using Error::Error;
};

/// A supplied map fails to be an order isomorphism on its entries.
class NotOrderIsomorphism : public Error {
 public:
  using Error::Error;
};

/// A reconstruction step could not verify one of its identities.
class ReconstructionFailure : public Error {
 public:
  using Error::Error;
};

/// The oracle is missing entries needed by a reconstruction, or its answers
/// contradict each other.
class InconsistentOracle : public Error {
 public:
  using Error::Error;
};

/// A linear map is neither multiplicative nor anti-multiplicative.
class NotJordan : public Error {
 public:
  using Error::Error;
};

/// The domain is C^2 or M_2(C): order data does not determine the Jordan
/// map. `candidates` describes the competing maps.
class ExceptionalAlgebra : public Error {
 public:
  ExceptionalAlgebra(const std::string& what, std::string candidates)
      : Error(what), candidates_(std::move(candidates)) {}

  const std::string& candidates() const noexcept { return candidates_; }

 private:
  std::string candidates_;
};

}  // namespace bohrlat
