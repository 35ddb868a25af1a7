#pragma once

#include <stdexcept>
#include <string>

namespace nlphase {

// Argument outside the mathematical domain of an operation (|x| > 1, radius
// larger than the box, k out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent or unusable configuration (q >= 1, under-resolved grid, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input data (NaN profile values, mismatched exterior data, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlphase
