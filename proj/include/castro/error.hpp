#pragma once

#include <stdexcept>
#include <string>

namespace castro {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration document or inconsistent partition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bounds or constraints that admit no feasible mixture, or a pipeline stage
// that produced no feasible rows.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Bad content in an experiment or design file.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's mathematical domain (dimension mismatch,
// points outside the unit cube, too few rows).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace castro
