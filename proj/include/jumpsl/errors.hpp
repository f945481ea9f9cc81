#pragma once

#include <stdexcept>
#include <string>

namespace jumpsl {

/// Base of every error raised by the library. `name()` is the stable
/// identifier printed by the CLI; `hint()` is a one-line remediation.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what, std::string hint = {})
      : std::runtime_error(what), name_(std::move(name)), hint_(std::move(hint)) {}

  const std::string& name() const noexcept { return name_; }
  const std::string& hint() const noexcept { return hint_; }

  /// Validation errors map to CLI exit status 1, numerical failures to 2.
  virtual bool is_validation() const noexcept { return false; }

 private:
  std::string name_;
  std::string hint_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
  bool is_validation() const noexcept override { return true; }
};

#define JUMPSL_DEFINE_ERROR(Type, Base, default_hint)                          \
  class Type : public Base {                                                   \
   public:                                                                     \
    explicit Type(const std::string& what, std::string hint = default_hint)    \
        : Base(#Type, what, std::move(hint)) {}                                \
  };

JUMPSL_DEFINE_ERROR(JumpOrderError, ValidationError,
                    "jump points must be strictly increasing inside (0, pi)")
JUMPSL_DEFINE_ERROR(JumpSignError, ValidationError, "every jump needs a*b > 0")
JUMPSL_DEFINE_ERROR(BoundaryConstraintError, ValidationError,
                    "eigenparameter data needs r1 = h3 - h1*h2 > 0 and r2 = H1*H2 - H3 > 0")
JUMPSL_DEFINE_ERROR(PotentialError, ValidationError,
                    "check potential samples/coefficients for NaN, Inf or bad layout")
JUMPSL_DEFINE_ERROR(DomainError, ValidationError, "positions must lie in [0, pi]")
JUMPSL_DEFINE_ERROR(MismatchError, ValidationError,
                    "both solutions must be evaluated at the same lambda")
JUMPSL_DEFINE_ERROR(VariantError, ValidationError,
                    "operation is only defined for the other boundary variant")
JUMPSL_DEFINE_ERROR(ConfigParseError, ValidationError, "check the JSON/CSV input against the schema")
JUMPSL_DEFINE_ERROR(FitSpecError, ValidationError,
                    "the unknown mask violates the hypotheses of the selected fit mode")
JUMPSL_DEFINE_ERROR(InterlacingError, ValidationError,
                    "the two spectra must interlace (lambda_n < mu_n < lambda_{n+1})")

JUMPSL_DEFINE_ERROR(ToleranceError, Error, "step control failed; the potential may be too rough")
JUMPSL_DEFINE_ERROR(MissedEigenvalueError, Error,
                    "contour count disagrees with the bracketed eigenvalues")
JUMPSL_DEFINE_ERROR(ContourTooCloseError, Error, "move the contour away from the eigenvalues")
JUMPSL_DEFINE_ERROR(QuadratureError, Error, "quadrature did not reach tolerance")
JUMPSL_DEFINE_ERROR(PoleError, Error, "lambda lies on (or too near) an eigenvalue")
JUMPSL_DEFINE_ERROR(CalibrationError, Error, "calibration point is unusable")
JUMPSL_DEFINE_ERROR(ForwardSolveError, Error, "forward problem failed for the candidate parameters")

#undef JUMPSL_DEFINE_ERROR

}  // namespace jumpsl
