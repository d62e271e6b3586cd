#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfbo {

// Shape mismatch between an input and the owning problem definition.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Cholesky failed even after the jitter ladder was exhausted.
class FactorizationError : public std::runtime_error {
public:
  FactorizationError(const std::string& what, std::vector<double> jitters)
      : std::runtime_error(what), attempted_jitters_(std::move(jitters)) {}
  const std::vector<double>& attempted_jitters() const { return attempted_jitters_; }

private:
  std::vector<double> attempted_jitters_;
};

// An operation was called in a configuration it does not support.
class UnsupportedError : public std::runtime_error {
public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfbo
