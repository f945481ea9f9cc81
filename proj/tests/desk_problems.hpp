#pragma once
// Small fixed problems shared by the unit and acceptance suites.

#include "jumpsl/problem.hpp"

namespace desk {

using namespace jumpsl;

inline ValidatedProblem free_problem() {
  return validate({constant_potential(0.0, 0), RobinBoundary{0.0, 0.0}, {}});
}

/// d = pi/2, a = 2, b = 1/2: Delta = (5/4) rho sin(rho pi).
inline ValidatedProblem half_jump() {
  return validate({constant_potential(0.0, 1), RobinBoundary{0.0, 0.0}, {{kPi / 2, 2.0, 0.5, 0.0}}});
}

/// q = 1, h = 1, H = -1, one jump at pi/3 with (a, b, c) = (2, 1, 1).
inline ValidatedProblem one_jump() {
  return validate({constant_potential(1.0, 1), RobinBoundary{1.0, -1.0}, {{kPi / 3, 2.0, 1.0, 1.0}}});
}

inline ValidatedProblem two_jumps() {
  PiecewisePolynomial q;
  q.coefficients = {{0.5, 0.3}, {-0.2, 0.1, 0.05}, {1.0, -0.4}};
  return validate({q, RobinBoundary{0.5, 0.3}, {{1.0, 1.5, 0.8, 0.4}, {2.2, 0.7, 1.2, -0.5}}});
}

/// Includes a jump with a, b < 0.
inline ValidatedProblem four_jumps() {
  PiecewisePolynomial q;
  q.coefficients = {{0.2}, {1.0, -0.5}, {0.0, 0.3, 0.2}, {-0.6}, {0.4, 0.2}};
  return validate({q,
                   RobinBoundary{-0.4, 0.7},
                   {{0.6, 1.2, 0.9, 0.3}, {1.3, -0.8, -1.1, 0.5}, {2.0, 1.5, 1.4, -0.2}, {2.7, 0.9, 0.6, 0.1}}});
}

inline ValidatedProblem three_jumps() {
  PiecewisePolynomial q;
  q.coefficients = {{1.0, 0.5}, {0.3}, {-0.5, 0.2}, {0.8, -0.1, 0.05}};
  return validate(
      {q, RobinBoundary{0.3, -0.2}, {{0.8, 1.5, 0.6, 0.4}, {1.7, 0.7, 1.3, -0.3}, {2.5, 1.1, 0.5, 0.2}}});
}

/// q = 0, h = (0, 0, 1), H = (0, 2, -1): r1 = r2 = 1.
inline ValidatedProblem eigen_desk() {
  return validate({constant_potential(0.0, 0), EigenparameterBoundary{0.0, 0.0, 1.0, 0.0, 2.0, -1.0}, {}});
}

inline ValidatedProblem eigen_jump() {
  return validate({constant_potential(0.3, 1), EigenparameterBoundary{0.5, 1.0, 2.0, 1.0, 1.5, 0.5},
                   {{kPi / 2, 2.0, 1.0, 0.5}}});
}

}  // namespace desk
