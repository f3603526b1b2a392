#pragma once

#include <stdexcept>
#include <string>

namespace chmhd {

// Base error for everything thrown by this library; message carries context
// (what failed plus the offending index/key where one exists).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class StepFailure : public Error {
public:
  StepFailure(const std::string& what, int newton_iters, double residual)
      : Error(what), newton_iters(newton_iters), residual(residual) {}
  int newton_iters;
  double residual;
};

} // namespace chmhd
