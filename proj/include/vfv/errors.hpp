#pragma once

#include <stdexcept>
#include <string>

namespace vfv {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual = 0.0)
      : Error(what), residual_(last_residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class MeasureError : public Error {
 public:
  using Error::Error;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vfv
