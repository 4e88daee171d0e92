#pragma once

#include <stdexcept>
#include <string>

namespace polent {

/// Rotation estimation could not produce a unique answer (degenerate or
/// depolarized probe responses, singular rotation mean).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: files, JSON documents, configuration values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polent
