#pragma once

#include <stdexcept>
#include <string>

namespace hybridode {

// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A configuration value is out of range or inconsistent with the problem.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failures: CFL violations, training divergence, singular solves.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class CflError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace hybridode
