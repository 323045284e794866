#pragma once

#include <stdexcept>
#include <string>

#include "staticpot/core/tensor.hpp"

namespace staticpot {

/// Base of every error raised by the library. Suites catch this type and turn
/// it into a failed check carrying `what()`.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define STATICPOT_DEFINE_ERROR(Name)                              \
  class Name : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
    const char* kind() const noexcept override { return #Name; } \
  };

STATICPOT_DEFINE_ERROR(DomainError)
STATICPOT_DEFINE_ERROR(SingularMetricError)
STATICPOT_DEFINE_ERROR(NotOrthogonalError)
STATICPOT_DEFINE_ERROR(NotStaticError)
STATICPOT_DEFINE_ERROR(ZeroPotentialError)
STATICPOT_DEFINE_ERROR(NonConvergentError)
STATICPOT_DEFINE_ERROR(DegenerateMetricError)
STATICPOT_DEFINE_ERROR(StepFailureError)
STATICPOT_DEFINE_ERROR(PreconditionError)
STATICPOT_DEFINE_ERROR(NoRootError)
STATICPOT_DEFINE_ERROR(MultiRootError)
STATICPOT_DEFINE_ERROR(MonotonicityError)
STATICPOT_DEFINE_ERROR(ResolutionError)
STATICPOT_DEFINE_ERROR(CriticalOnZeroSet)
STATICPOT_DEFINE_ERROR(UnboundedPotentialError)
STATICPOT_DEFINE_ERROR(IllConditionedFitError)
STATICPOT_DEFINE_ERROR(QuadratureBudgetError)
STATICPOT_DEFINE_ERROR(DegenerateConformalError)
STATICPOT_DEFINE_ERROR(ParseError)
STATICPOT_DEFINE_ERROR(ConfigError)
STATICPOT_DEFINE_ERROR(IoError)

#undef STATICPOT_DEFINE_ERROR

/// Raised when an integrated curve leaves the chart; carries the last point
/// known to be inside.
class DomainExitError : public Error {
 public:
  DomainExitError(const std::string& msg, const Vec3d& exit_point)
      : Error(msg), exit_point_(exit_point) {}
  const char* kind() const noexcept override { return "DomainExitError"; }
  const Vec3d& exit_point() const { return exit_point_; }

 private:
  Vec3d exit_point_;
};

inline std::string format_point(const Vec3d& p) {
  return "(" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " + std::to_string(p[2]) + ")";
}

}  // namespace staticpot
