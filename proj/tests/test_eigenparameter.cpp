#include <cmath>

#include "desk_problems.hpp"
#include "doctest.h"
#include "jumpsl/eigenparameter_bc.hpp"
#include "jumpsl/errors.hpp"
#include "jumpsl/asymptotics.hpp"
#include "jumpsl/weyl.hpp"
#include "oracles.hpp"

using namespace jumpsl;

TEST_CASE("boundary functionals are the defining expressions") {
  const auto p = desk::eigen_jump();
  const auto& e = p.eigenparameter();
  const auto b = BoundaryFunctionals::of(p);
  CHECK(b.r1 == e.h3 - e.h1 * e.h2);
  CHECK(b.r2 == e.H1 * e.H2 - e.H3);
  const auto phi = fundamental_solution(p, SolutionKind::kPhi, SpectralPoint::from_lambda(cplx(3.0, 1.0)));
  const auto s0 = phi.at(0.0), s1 = phi.at(kPi, Side::kLeft);
  CHECK(b.R1(phi) == s0.yp + e.h1 * s0.y);
  CHECK(b.R1_prime(phi) == e.h2 * s0.yp + e.h3 * s0.y);
  CHECK(b.R2(phi) == s1.yp + e.H1 * s1.y);
  CHECK(b.R2_prime(phi) == e.H2 * s1.yp + e.H3 * s1.y);
  // phi satisfies the left condition: R1 = r1 for every lambda.
  CHECK(std::abs(b.R1(phi) - b.r1) < 1e-14);
  CHECK_THROWS_AS(BoundaryFunctionals::of(desk::one_jump()), VariantError);
}

TEST_CASE("vector norm") {
  const auto p = desk::eigen_desk();
  const auto sp = SpectralPoint::from_lambda(2.5);
  const auto zero = shoot(p, sp, {{0.0, 0.0, 0.0}, 0.0, 0.0});
  CHECK(vector_norm_sq(p, VectorState::of(p, zero)) == 0.0);

  const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp);
  const auto v = VectorState::of(p, phi);
  const double body = oracle::composite_gauss(
      [&](double x) { return static_cast<double>(std::norm(oracle::shoot_forward(p, 2.5, {2.5L, 1.0L}, x).y)); }, 0.0,
      kPi, 16);
  CHECK(std::abs(vector_norm_sq(p, v) - (body + std::norm(v.f1) + std::norm(v.f2))) < 1e-8);
  CHECK_THROWS_AS(vector_norm_sq(desk::one_jump(), v), VariantError);

  // Doubling r1 through h3 halves the f1 term when f is held fixed.
  auto spec = p.spec();
  auto& bc = std::get<EigenparameterBoundary>(spec.boundary);
  bc.h3 = 2.0 * bc.r1() + bc.h1 * bc.h2;
  const auto p2 = validate(spec);
  const double with_r1 = vector_norm_sq(p, v), with_2r1 = vector_norm_sq(p2, v);
  CHECK(std::abs((with_r1 - with_2r1) - 0.5 * std::norm(v.f1)) < 1e-12 * with_r1);
}

TEST_CASE("norming constant sum rule") {
  const auto p = desk::eigen_desk();
  const auto sd = spectral_data(p, eigenvalues(p, 200));
  double prev = 0.0;
  for (std::size_t N = 1; N <= 200; ++N) {
    const double s = gamma_sum_partial(sd, N);
    CHECK(s > prev);
    prev = s;
  }
  const double target = 1.0 / p.eigenparameter().r1();
  CHECK(std::abs(prev - target) < 0.05 * target);
  CHECK_THROWS_AS(gamma_sum_partial(spectral_data(desk::one_jump(), eigenvalues(desk::one_jump(), 3)), 2),
                  VariantError);
  CHECK_THROWS_AS(gamma_sum_partial(sd, 201), DomainError);
}

TEST_CASE("m asymptote along the negative axis") {
  const auto p = desk::eigen_desk();
  const double r1 = p.eigenparameter().r1();
  double prev = INFINITY;
  for (double t : {10.0, 20.0, 40.0}) {
    const double lambda = -t * t;
    const double scaled = std::abs(weyl_m(p, lambda).m + 1.0 / (r1 * lambda)) * std::pow(std::abs(lambda), 1.4);
    CHECK(scaled < 1.0);
    CHECK(scaled <= prev);
    prev = scaled;
  }
}

TEST_CASE("leading term is rho^2 times the Robin-type sum") {
  const auto p = desk::eigen_jump();
  double prev = 0.0;
  for (double r : {40.0, 80.0, 160.0}) {
    const auto phi = fundamental_solution(p, SolutionKind::kPhi, SpectralPoint::from_rho(r));
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double x = (i + 0.5) * kPi / 30;
      worst = std::max(worst, std::abs(phi.at(x).y - asymptotic_eval(p, AsymptoticTarget::kPhi, x, r)) / r);
    }
    if (prev > 0) CHECK(worst / prev < 1.2);
    prev = worst;
  }
}
