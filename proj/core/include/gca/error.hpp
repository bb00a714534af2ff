#pragma once

#include <stdexcept>
#include <string>

namespace gca {

// Base for every error raised by the library. The CLI maps all of these to
// the "data error" exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed case text: bad table, wrong column count, unreadable file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a model invariant (dangling endpoint,
// duplicate branch key, nonpositive reactance, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Singular or otherwise unsolvable linear system.
class SolveError : public Error {
 public:
  using Error::Error;
};

// Reference to a bus, branch, node or edge that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace gca
