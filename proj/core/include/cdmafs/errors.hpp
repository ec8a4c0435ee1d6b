#pragma once

#include <stdexcept>
#include <string>

namespace cdmafs {

// Invalid configuration / parameters (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent input data (CLI exit code 3).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cdmafs
