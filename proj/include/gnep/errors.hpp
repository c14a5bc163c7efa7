#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gnep {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
  SyntaxError(std::size_t position, const std::string& what_arg)
      : Error("syntax error at position " + std::to_string(position) + ": " + what_arg),
        position(position) {}
  std::size_t position;
};

struct UnknownVariableError : Error {
  explicit UnknownVariableError(const std::string& variable)
      : Error("unknown variable '" + variable + "'"), name(variable) {}
  std::string name;
};

struct EvaluationError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

// An individual constraint of one player mentions another player's variable.
struct CrossReferenceError : Error {
  using Error::Error;
};

struct InfeasiblePointError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct NotConvexFlaggedError : Error {
  NotConvexFlaggedError()
      : Error("instance is not flagged convex (c1/c2); refusing to certify") {}
};

struct LicqFailedError : Error {
  using Error::Error;
};

struct CombinatorialCapError : Error {
  using Error::Error;
};

struct UnknownFixtureError : Error {
  explicit UnknownFixtureError(const std::string& name)
      : Error("unknown fixture '" + name + "'") {}
};

}  // namespace gnep
