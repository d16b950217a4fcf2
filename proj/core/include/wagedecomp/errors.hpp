#pragma once

#include <stdexcept>
#include <string>

namespace wagedecomp {

/// Base class for every failure raised by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, schema, or input shape: the request itself is
/// malformed. The CLI maps this to exit code 2.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Numeric or data failure on an otherwise well-formed request (domain
/// errors, rank deficiency, empty groups). The CLI maps this to exit code 1.
class ComputeError : public Error {
  public:
    using Error::Error;
};

} // namespace wagedecomp
