#pragma once

#include <stdexcept>
#include <string>

namespace mxc {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input document could not be parsed or violates the schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Matrix is not Hermitian within the input tolerance.
class HermiticityError : public Error {
 public:
  using Error::Error;
};

/// Underlying graph is block-diagonal (disconnected after permutation).
class DisconnectedError : public Error {
 public:
  using Error::Error;
};

/// Matrix has no off-diagonal entries above the zero threshold.
class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

/// Requested bipartite reduction on a graph with an odd cycle.
class NotBipartiteError : public Error {
 public:
  using Error::Error;
};

/// Per-edge wavefunction reconstructions disagree beyond tolerance.
class InconsistentAmplitudes : public Error {
 public:
  using Error::Error;
};

/// An eigenvalue computation did not converge.
class EigensolveFailure : public Error {
 public:
  using Error::Error;
};

/// Spectral sum has a vanishing denominator (eigenvalue 1 repeated).
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// log |U^t_{ba}|^2 requested for a vanishing matrix element.
class ZeroAmplitude : public Error {
 public:
  using Error::Error;
};

/// Trajectory enumeration exceeds the configured cap.
class EnumerationCap : public Error {
 public:
  using Error::Error;
};

/// Ensemble parameters do not admit a realization.
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

/// Requested Hilbert space dimension above the dense-construction cap.
class DimensionCap : public Error {
 public:
  using Error::Error;
};

/// Zero vector where a normalizable vector is required.
class ZeroVector : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mxc
