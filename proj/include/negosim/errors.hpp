#pragma once

#include <stdexcept>
#include <string>

namespace negosim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An offer or constraint that does not fit its issue domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values (probabilities out of range, odd population, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The requested computation is refused because the domain is too large to
// enumerate exactly.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario, plan or population file. The message carries the
// offending field path or line.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace negosim
