#pragma once

#include <string>
#include <vector>

#include "jumpsl/problem.hpp"
#include "jumpsl/propagator.hpp"
#include "jumpsl/spectrum.hpp"

namespace jumpsl {

struct WeylSample {
  cplx lambda;
  cplx m;
  cplx delta;
  /// theta(0, lambda) = psi(0, lambda) / Delta(lambda).
  cplx theta0;
  bool eigenparameter = false;
};

/// m = -psi(0)/Delta (Robin) or -R1(psi)/(r1 Delta) (eigenparameter).
/// PoleError when lambda is within 1e-10 max(1, |lambda_n|) of a zero of
/// Delta, judged by the Newton distance |Delta / Delta'|.
WeylSample weyl_m(const ValidatedProblem& p, cplx lambda);

struct WeylTheta {
  cplx theta;
  cplx theta_prime;
  /// |psi/Delta - (chi - m phi)| relative to max(1, |psi/Delta|), over value
  /// and derivative.
  double discrepancy;
};

/// theta = psi/Delta at x, with the chi - m phi side computed for
/// comparison.
WeylTheta weyl_theta(const ValidatedProblem& p, double x, cplx lambda, Side side = Side::kRight);

/// The Weyl solution psi/Delta as a whole solution (kind theta).
PiecewiseSolution weyl_solution(const ValidatedProblem& p, cplx lambda);

/// ||theta||^2 in the problem's space; in the eigenparameter case the
/// boundary components R1(theta), R2(theta) are included.
double weyl_solution_norm_sq(const ValidatedProblem& p, cplx lambda);

/// sum_{n<N} gamma_n / (lambda_n - lambda). PoleError next to a lambda_n;
/// DomainError if N exceeds the records or a gamma is missing.
cplx partial_fraction_m(const SpectralData& sd, cplx lambda, std::size_t N);

struct TwoSpectra {
  std::vector<double> primary;    // lambda_n
  std::vector<double> secondary;  // mu_n
  /// Only k = infinity (Dirichlet at 0) is supported.
  double k = INFINITY;
};

/// InterlacingError unless lambda_0 < mu_0 < lambda_1 < mu_1 < ...
void check_interlacing(const TwoSpectra& ts);

struct TwoSpectraValue {
  cplx m;
  /// Same value calibrated at -(8N)^2 instead of -(4N)^2.
  cplx alternate;
  double calibration_shift;
};

/// m from its poles and zeros: paired product over n < N with a modelled
/// tail lambda_n = (n + a)^2, mu_n = (n + b)^2 for n >= N (a, b averaged
/// over the last N/4 pairs), normalised so that
/// m(-(4N)^2) = 1/(4N). Throws InterlacingError, CalibrationError (shift
/// above 1e-3 or non-finite), PoleError, DomainError (finite k, N out of
/// range).
TwoSpectraValue m_from_two_spectra(const TwoSpectra& ts, cplx lambda, std::size_t N);

/// re_lambda,im_lambda,re_m,im_m
std::string weyl_samples_csv(const std::vector<WeylSample>& samples);

}  // namespace jumpsl
