#pragma once

#include <stdexcept>
#include <string>

namespace nonstat {

// Base of all library errors. Subclasses map onto the stable CLI exit codes:
// validation -> 2, numerical -> 3, i/o -> 4.
class Error : public std::runtime_error {
 public:
  enum class Category { validation, numerical, io };

  Error(Category cat, std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), cat_(cat), kind_(std::move(kind)) {}

  Category category() const noexcept { return cat_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  Category cat_;
  std::string kind_;
};

#define NONSTAT_DEFINE_ERROR(NAME, CAT)                      \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& msg)                    \
        : Error(Error::Category::CAT, #NAME, msg) {}         \
  }

NONSTAT_DEFINE_ERROR(ParseError, validation);
NONSTAT_DEFINE_ERROR(DataError, validation);
NONSTAT_DEFINE_ERROR(PartitionError, validation);
NONSTAT_DEFINE_ERROR(ShapeError, validation);
NONSTAT_DEFINE_ERROR(DegenerateError, validation);
NONSTAT_DEFINE_ERROR(DomainError, validation);
NONSTAT_DEFINE_ERROR(ParamError, validation);
NONSTAT_DEFINE_ERROR(ExistenceError, validation);
NONSTAT_DEFINE_ERROR(UnsupportedError, validation);
NONSTAT_DEFINE_ERROR(PlanError, validation);
NONSTAT_DEFINE_ERROR(ConfigError, validation);

NONSTAT_DEFINE_ERROR(SingularError, numerical);
NONSTAT_DEFINE_ERROR(FitError, numerical);
NONSTAT_DEFINE_ERROR(EvalError, numerical);

NONSTAT_DEFINE_ERROR(IoError, io);

#undef NONSTAT_DEFINE_ERROR

// Numerical result did not reach the requested tolerance. Carries the
// best-effort value and the achieved error estimate so fitting loops can
// degrade softly instead of aborting.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& msg, double best_value, double err_estimate)
      : Error(Error::Category::numerical, "PrecisionError", msg),
        value(best_value), estimate(err_estimate) {}
  double value;
  double estimate;
};

// Quadrature failed to converge; carries the best estimate reached.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& msg, double best_value, double err_estimate)
      : Error(Error::Category::numerical, "IntegrationError", msg),
        value(best_value), estimate(err_estimate) {}
  double value;
  double estimate;
};

// Coefficient matrix is rank deficient; reports the offending singular value.
class RankError : public Error {
 public:
  RankError(const std::string& msg, double smallest_sv)
      : Error(Error::Category::validation, "RankError", msg),
        smallest_singular_value(smallest_sv) {}
  double smallest_singular_value;
};

}  // namespace nonstat
