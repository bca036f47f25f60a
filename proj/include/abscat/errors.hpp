#pragma once

#include <stdexcept>
#include <string>

namespace abscat {

//! Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// special functions
class PoleError : public Error {
  public:
    using Error::Error;
};
class RangeError : public Error {
  public:
    using Error::Error;
};
class DegenerateOrderError : public Error {
  public:
    using Error::Error;
};

// channel solver
class DegenerateModeError : public Error {
  public:
    using Error::Error;
};
class ModelRegimeMismatch : public Error {
  public:
    using Error::Error;
};
class UnitarityViolation : public Error {
  public:
    using Error::Error;
};
class ForwardDirectionError : public Error {
  public:
    using Error::Error;
};
class IncompleteRangeError : public Error {
  public:
    using Error::Error;
};

// numerical integration and matching
class StiffnessError : public Error {
  public:
    StiffnessError(const std::string& what, double rho)
        : Error(what + " (rho = " + std::to_string(rho) + ")"), rho_(rho) {}
    double rho() const { return rho_; }

  private:
    double rho_;
};
class FitDegenerateError : public Error {
  public:
    using Error::Error;
};

//! Invalid configuration values (negative wavenumber, beta outside [0,1), ...)
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace abscat
