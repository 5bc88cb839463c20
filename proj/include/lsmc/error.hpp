#pragma once

#include <stdexcept>
#include <string>

namespace lsmc {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Series, quadrature or optimizer failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (CSV contents, shapes).
class DataError : public Error {
 public:
  using Error::Error;
};

// VAR fit could not be computed from the data.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsmc
