#pragma once

#include <stdexcept>
#include <string>

namespace slowdiff {

/// Invalid user-facing configuration (bad key, bad value, missing field).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what, int line = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Failure of the numerical integration itself. The kind is a short
/// machine-readable tag: "stiff_blowup", "density_blowup", "not_steady",
/// "bracket", "non_monotone".
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace slowdiff
