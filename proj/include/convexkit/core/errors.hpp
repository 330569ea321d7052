#pragma once

#include <stdexcept>
#include <string>

namespace convexkit {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CONVEXKIT_DEFINE_ERROR(Name)            \
  class Name : public Error {                   \
   public:                                      \
    using Error::Error;                         \
  }

// core
CONVEXKIT_DEFINE_ERROR(InvalidArgument);
CONVEXKIT_DEFINE_ERROR(DegenerateInput);
CONVEXKIT_DEFINE_ERROR(UnboundedBody);
CONVEXKIT_DEFINE_ERROR(EmptyBody);
CONVEXKIT_DEFINE_ERROR(DegenerateVertex);
CONVEXKIT_DEFINE_ERROR(SchemaError);

// intrinsic metric
CONVEXKIT_DEFINE_ERROR(InvalidNet);
CONVEXKIT_DEFINE_ERROR(SearchBudgetExceeded);
CONVEXKIT_DEFINE_ERROR(TriangleInequalityViolated);

// Monge-Ampere
CONVEXKIT_DEFINE_ERROR(NotEnvelopeVertex);
CONVEXKIT_DEFINE_ERROR(UnboundedCell);
CONVEXKIT_DEFINE_ERROR(QuadratureFailure);
CONVEXKIT_DEFINE_ERROR(Infeasible);
CONVEXKIT_DEFINE_ERROR(IncomparableProblems);

// Minkowski
CONVEXKIT_DEFINE_ERROR(NegativeCurvature);
CONVEXKIT_DEFINE_ERROR(DegenerateFace);

// rigidity
CONVEXKIT_DEFINE_ERROR(DegenerateGeometry);
CONVEXKIT_DEFINE_ERROR(NotStrictlyConvex);
CONVEXKIT_DEFINE_ERROR(PrecisionWarning);

// cli
CONVEXKIT_DEFINE_ERROR(UnknownDemo);

#undef CONVEXKIT_DEFINE_ERROR

/// Malformed input text. Carries the 1-based line (0 when unknown) and the
/// offending field name (empty when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, std::string field = {})
      : Error(decorate(what, line, field)), line_(line), field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string decorate(const std::string& what, int line, const std::string& field) {
    std::string out = what;
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    if (!field.empty()) out += " [field '" + field + "']";
    return out;
  }

  int line_;
  std::string field_;
};

/// An iterative solver ran out of iterations. `best_residual` is the smallest
/// residual reached.
class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, double best_residual)
      : Error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

/// A continuation run could not shrink its step further. `last_parameter` is
/// the last parameter value that was solved successfully.
class MinStepReached : public Error {
 public:
  MinStepReached(const std::string& what, double last_parameter)
      : Error(what + " (last solved t = " + std::to_string(last_parameter) + ")"),
        last_parameter_(last_parameter) {}

  double last_parameter() const { return last_parameter_; }

 private:
  double last_parameter_;
};

}  // namespace convexkit
