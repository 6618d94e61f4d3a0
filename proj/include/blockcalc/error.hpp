#pragma once

#include <stdexcept>
#include <string>

namespace blockcalc {

// Bad parameters, presets or config documents. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unparseable or unusable input data (measurement files, degenerate fits).
// The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blockcalc
