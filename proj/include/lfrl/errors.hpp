#pragma once

#include <stdexcept>
#include <string>

namespace lfrl {

// Malformed LFB container or mosaic image.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ray with no usable intersection with the two parameterization planes.
class DegenerateRayError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operands whose dimensions disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad configuration value or unparseable config text.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN or infinity encountered inside an iteration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lfrl
