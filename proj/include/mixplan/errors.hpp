#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mixplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (scenario files, CSVs). Carries a line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Input parsed but violates domain invariants. Collects every field-level
/// issue instead of stopping at the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "validation failed:";
    for (const auto& e : v) s += "\n  - " + e;
    return s;
  }
  std::vector<std::string> issues_;
};

class UnknownId : public Error {
 public:
  explicit UnknownId(const std::string& id) : Error("unknown id: " + id) {}
};

/// Product's mold cannot run on the requested machine.
class IncompatiblePair : public Error {
 public:
  IncompatiblePair(const std::string& machine, const std::string& product)
      : Error("incompatible pair: machine " + machine + ", product " + product) {}
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Simplex pivoting exceeded its iteration cap; the instance is ill-conditioned.
class NumericalFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Branch-and-bound limits exhausted without any integer-feasible point.
/// Distinct from a proven Infeasible result.
class NoIncumbentAtLimit : public SolverError {
 public:
  using SolverError::SolverError;
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class InconsistentState : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public ParseError {
 public:
  explicit VersionMismatch(const std::string& what) : ParseError(what) {}
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace mixplan
