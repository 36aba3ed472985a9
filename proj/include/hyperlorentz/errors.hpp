#pragma once

#include <stdexcept>
#include <string>

namespace hyperlorentz {

/// A precondition of a geometric or dynamical operation was violated by the caller.
class contract_error : public std::invalid_argument {
 public:
  explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

/// An experiment or simulation was configured with values that cannot be run.
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Failure while running: runaway event loops, unwritable outputs.
class runtime_failure : public std::runtime_error {
 public:
  explicit runtime_failure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hyperlorentz
