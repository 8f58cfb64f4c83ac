#pragma once

#include <stdexcept>
#include <string>

namespace tileopt {

// Bad input: malformed config, invalid lattice, out-of-range parameter.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced something unusable (non-finite energy, empty sample set).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tileopt
