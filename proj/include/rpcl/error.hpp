#pragma once

#include <stdexcept>
#include <string>

namespace rpcl {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input/output vector length does not match what the callee expects.
struct DimensionError : Error {
  using Error::Error;
};

/// Invalid configuration value or violated config invariant.
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed file content; carries the 1-based line where parsing failed.
struct ParseError : Error {
  ParseError(const std::string& msg, int line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  int line;
};

/// Non-finite value encountered where training must abort.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace rpcl
