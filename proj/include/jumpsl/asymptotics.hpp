#pragma once

#include <complex>
#include <vector>

#include "jumpsl/problem.hpp"

namespace jumpsl {

/// One term of the leading high-energy expansion. `subset` lists the
/// (0-based) jumps taken with alpha'; the others contribute alpha.
struct ReflectionTerm {
  std::vector<int> subset;
  unsigned mask = 0;
  double coefficient = 0.0;
  double phase = 0.0;
};

/// All 2^k terms for a point in segment k (k jumps to its left), ordered by
/// bitmask. Bit i of the mask is jump i.
std::vector<ReflectionTerm> reflection_terms(const ValidatedProblem& p, int segment);

enum class AsymptoticTarget { kPhi, kPhiPrime, kDelta };

/// Leading-order phi(x), phi'(x) or Delta (x ignored). With eigenparameter
/// conditions Delta = W(phi, psi) leads with -rho^5 w(pi) times the sine sum. DomainError if x is a
/// jump point or outside [0, pi], or rho == 0.
std::complex<double> asymptotic_eval(const ValidatedProblem& p, AsymptoticTarget target, double x,
                                     std::complex<double> rho);

/// The real sine sum whose zeros are the leading-order eigenvalue estimates
/// (Delta with w(pi) and the rho powers divided out).
double asymptotic_sine_sum(const ValidatedProblem& p, double rho);

/// The first `count` nonnegative zeros of the sine sum, ascending. rho = 0 is
/// always a zero.
std::vector<double> eigenvalue_guesses(const ValidatedProblem& p, std::size_t count);

struct AsymptoticRow {
  double rho = 0.0;
  std::complex<double> delta;
  std::complex<double> delta_asymptotic;
  /// max over 30 midpoints x of |phi - phi_asym| |rho| e^{-|tau| x}, divided
  /// by |rho|^2 with eigenparameter conditions.
  double scaled_error = 0.0;
  /// scaled_error over the previous row's; NaN on the first row.
  double ratio = 0.0;
};

/// Exact against leading-order values at each rho (rho > 0, real).
std::vector<AsymptoticRow> asymptotic_report(const ValidatedProblem& p, const std::vector<double>& rhos);

}  // namespace jumpsl
