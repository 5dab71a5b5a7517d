#pragma once

#include <stdexcept>
#include <string>

namespace mixens {

// Every error raised by the library derives from Error so callers (the CLI in
// particular) can catch one type and still report the specific category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file: bad header, wrong column count, unparsable number.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed data that breaks a domain invariant (row sums, negative probs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that should share sample ids (in order) do not.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class MissingPredictorError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration (k > n, C < 2, out-of-range factors).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input that is structurally valid but too small to work on (empty sets).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixens
