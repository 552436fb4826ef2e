#pragma once

#include <stdexcept>
#include <string>

namespace dhg {

// User-facing configuration / validation problem. The CLI maps this to
// exit code 1; any other exception is an internal failure (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dhg
