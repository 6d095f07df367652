#pragma once

#include <stdexcept>
#include <string>

namespace newsfmt {

/// Thrown when an operation receives input that violates its preconditions
/// (degenerate images, mismatched dimensions, malformed files).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unknown configuration. Reported by the CLI as a usage error.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace newsfmt
