#pragma once

#include "jumpsl/problem.hpp"
#include "jumpsl/propagator.hpp"
#include "jumpsl/spectrum.hpp"

namespace jumpsl {

/// R1(y) = y'(0) + h1 y(0), R1'(y) = h2 y'(0) + h3 y(0), and the same at pi
/// with H1, H2, H3.
struct BoundaryFunctionals {
  EigenparameterBoundary bc;
  double r1 = 0.0;
  double r2 = 0.0;

  /// VariantError for Robin problems.
  static BoundaryFunctionals of(const ValidatedProblem& p);

  cplx R1(const PiecewiseSolution& y) const;
  cplx R1_prime(const PiecewiseSolution& y) const;
  cplx R2(const PiecewiseSolution& y) const;
  cplx R2_prime(const PiecewiseSolution& y) const;
};

/// An element (f, R1(f), R2(f)) of the extended space.
struct VectorState {
  PiecewiseSolution f;
  cplx f1;
  cplx f2;

  static VectorState of(const ValidatedProblem& p, PiecewiseSolution f);
};

/// int |f|^2 w + (w(0)/r1)|f1|^2 + (w(pi)/r2)|f2|^2. VariantError for Robin
/// problems.
double vector_norm_sq(const ValidatedProblem& p, const VectorState& v);

/// Sum of the first N norming constants. VariantError unless `sd` comes
/// from an eigenparameter problem; DomainError if N exceeds the records.
double gamma_sum_partial(const SpectralData& sd, std::size_t N);

}  // namespace jumpsl
