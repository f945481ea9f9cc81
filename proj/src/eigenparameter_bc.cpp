#include "jumpsl/eigenparameter_bc.hpp"

#include <algorithm>
#include <cmath>

#include "internal/quadrature.hpp"
#include "jumpsl/errors.hpp"

namespace jumpsl {

BoundaryFunctionals BoundaryFunctionals::of(const ValidatedProblem& p) {
  const auto& e = p.eigenparameter();
  return {e, e.r1(), e.r2()};
}

cplx BoundaryFunctionals::R1(const PiecewiseSolution& y) const {
  const auto s = y.at(0.0);
  return s.yp + bc.h1 * s.y;
}

cplx BoundaryFunctionals::R1_prime(const PiecewiseSolution& y) const {
  const auto s = y.at(0.0);
  return bc.h2 * s.yp + bc.h3 * s.y;
}

cplx BoundaryFunctionals::R2(const PiecewiseSolution& y) const {
  const auto s = y.at(kPi, Side::kLeft);
  return s.yp + bc.H1 * s.y;
}

cplx BoundaryFunctionals::R2_prime(const PiecewiseSolution& y) const {
  const auto s = y.at(kPi, Side::kLeft);
  return bc.H2 * s.yp + bc.H3 * s.y;
}

VectorState VectorState::of(const ValidatedProblem& p, PiecewiseSolution f) {
  const auto b = BoundaryFunctionals::of(p);
  const cplx f1 = b.R1(f), f2 = b.R2(f);
  return {std::move(f), f1, f2};
}

double vector_norm_sq(const ValidatedProblem& p, const VectorState& v) {
  const auto b = BoundaryFunctionals::of(p);
  const double panel = std::min(0.5, 1.0 / std::max(1.0, std::abs(v.f.point().rho)));
  const double body =
      internal::weighted_integral(p, [&](double x) { return std::norm(v.f.at(x).y); }, panel, 1e-10);
  return body + p.weights().front() / b.r1 * std::norm(v.f1) + p.weights().back() / b.r2 * std::norm(v.f2);
}

double gamma_sum_partial(const SpectralData& sd, std::size_t N) {
  if (!sd.eigenparameter) throw VariantError("the norming-constant sum rule applies to eigenparameter problems");
  if (N > sd.records.size()) throw DomainError("not enough spectral records for the requested partial sum");
  double sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) sum += sd.records[n].gamma;
  return sum;
}

}  // namespace jumpsl
