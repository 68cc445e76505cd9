#pragma once

#include <stdexcept>
#include <string>

namespace pacvi {

// All library errors derive from std::invalid_argument or std::runtime_error
// so callers can catch broadly; the subtypes exist for the CLI exit-code map
// and for tests that pin the failure mode.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pacvi
