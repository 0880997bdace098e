#pragma once

#include <stdexcept>
#include <string>

namespace mbsts {

// Exit codes used by the command line front end.
enum class ExitCode : int { ok = 0, config = 2, numeric = 3, io = 4 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbsts
