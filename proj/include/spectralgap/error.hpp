#pragma once

#include <stdexcept>
#include <string>

namespace spectralgap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: malformed domain, out-of-range parameter, dimension mismatch.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// An iterative or adaptive numerical method failed to meet its tolerance.
class ConvergenceFailure : public Error {
public:
  using Error::Error;
};

}  // namespace spectralgap
