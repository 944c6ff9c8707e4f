#pragma once

#include <stdexcept>
#include <string>

namespace lsekit {

// Base for every error the library raises. The CLI maps the subclasses onto
// process exit codes (config -> 2, numerical -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, inconsistent dimensions, invalid
// parameters, malformed data files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Conditioning failures that survive jitter escalation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures; the message always carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsekit
