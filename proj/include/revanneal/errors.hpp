#pragma once

#include <stdexcept>
#include <string>

namespace revanneal {

/// Invalid model parameters or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine could not deliver a result within its contract
/// (eigensolver non-convergence, step-size underflow, norm drift).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace revanneal
