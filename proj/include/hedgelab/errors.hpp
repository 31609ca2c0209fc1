#pragma once

#include <stdexcept>
#include <string>

namespace hedgelab {

/// A parameter lies outside the domain an operation accepts (n = 0, mu = 2, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its mathematical domain (t >= 1, lambda <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature or other numerical routine failed to meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible combination of otherwise valid settings.
class ConfigurationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hedgelab
