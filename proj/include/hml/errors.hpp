#pragma once

#include <stdexcept>
#include <string>

namespace hml {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParameterError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct ConsistencyError : Error {
  using Error::Error;
};

struct DegeneracyError : Error {
  using Error::Error;
};

struct PrecisionError : Error {
  using Error::Error;
};

struct ConditioningError : Error {
  using Error::Error;
};

struct TableError : Error {
  using Error::Error;
};

// Carries the best estimate reached before the budget ran out.
struct ResourceError : Error {
  double best_estimate = 0.0;
  double gap = 0.0;
  ResourceError(const std::string& what, double best = 0.0, double g = 0.0)
      : Error(what), best_estimate(best), gap(g) {}
};

}  // namespace hml
