#pragma once

#include <stdexcept>
#include <string>

namespace bafo {

// Base of every error raised by the library. Each subclass maps to a
// distinct failure class so callers (and the CLI) can react by type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input grid is not strictly ascending.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// Some type has no allowable bid strictly between it and the type below.
class RichnessError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of probability zero.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured budget.
class ComplexityError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or input document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bafo
