#pragma once

#include <stdexcept>
#include <string>

namespace repkl {

/// Base class for domain errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// p(a) > 0 where the reference q(a) = 0; stands in for the +infinity
/// convention of the KL divergence so callers must handle it deliberately.
class SupportMismatchError : public Error {
 public:
  explicit SupportMismatchError(const std::string& what) : Error(what) {}
};

/// A conditional distribution was requested on a block with no mass.
class ZeroBlockMassError : public Error {
 public:
  explicit ZeroBlockMassError(const std::string& what) : Error(what) {}
};

/// The stationary solver found more than one invariant direction
/// (reducible block kernel).
class NonUniqueInvariantError : public Error {
 public:
  explicit NonUniqueInvariantError(const std::string& what) : Error(what) {}
};

/// Block masses of a trajectory state drifted from the conserved initial
/// masses; signals that a non-block-invariant kernel was applied.
class MassDriftError : public Error {
 public:
  explicit MassDriftError(const std::string& what) : Error(what) {}
};

}  // namespace repkl
