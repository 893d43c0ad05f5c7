#pragma once

#include <stdexcept>
#include <string>

namespace saw {

// Base class for all library errors so callers can catch by layer.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument values, violated preconditions, malformed configuration.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// File content that cannot be interpreted (database entries, Touchstone,
// manifests). Carries a human-readable location where available.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Requested id absent from a database or collection.
class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& what) : Error(what) {}
};

// Numerical failure inside a solver (non-convergence, defective
// eigenproblem, lost mode match).
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

}  // namespace saw
