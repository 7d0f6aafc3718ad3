// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sdon {

// Base of every error raised by the library. The CLI maps the subclasses
// onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (bad shapes, out-of-range arguments).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// On-disk data failed validation: checksum, truncation, version, conventions.
class DataError : public Error {
 public:
  using Error::Error;
};

// Solver divergence, non-finite loss, unconverged iteration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdon
