#pragma once

#include <stdexcept>
#include <string>

namespace tas {

// Process exit codes shared by the CLI and the acceptance runner.
enum class ExitCode : int { ok = 0, failure = 1, usage = 2, non_convergence = 3 };

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

#define TAS_ERROR(Name, Code)                                                    \
  class Name : public Error {                                                    \
   public:                                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what, Code) {}   \
  };

TAS_ERROR(NonPositiveCorrection, ExitCode::failure)
TAS_ERROR(NonConvergent, ExitCode::non_convergence)
TAS_ERROR(QuadratureFailure, ExitCode::non_convergence)
TAS_ERROR(MismatchedRefinement, ExitCode::usage)
TAS_ERROR(IllegalTopple, ExitCode::failure)
TAS_ERROR(OutOfBox, ExitCode::failure)
TAS_ERROR(NonTermination, ExitCode::non_convergence)
TAS_ERROR(UnboundedSupport, ExitCode::usage)
TAS_ERROR(BudgetExceeded, ExitCode::non_convergence)
TAS_ERROR(ValidationError, ExitCode::usage)

#undef TAS_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("ParseError at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what,
              ExitCode::usage),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace tas
