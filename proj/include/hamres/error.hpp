#pragma once

#include <stdexcept>
#include <string>

namespace hamres {

// Caller passed something outside an operation's domain (bad vertex id,
// malformed file, mismatched graphs).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value is well-formed but outside the range an operation accepts, e.g. a
// sandwich slice size outside [e(G-), e(G+)].
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Experiment configuration that fails validation.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// Broken internal invariant. Seeing one of these is a bug in this library.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hamres
