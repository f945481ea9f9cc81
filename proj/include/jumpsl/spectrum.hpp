#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jumpsl/problem.hpp"
#include "jumpsl/propagator.hpp"

namespace jumpsl {

enum class Certification { kBracketed, kContourVerified };

const char* to_string(Certification c);

struct EigenRecord {
  int n = 0;
  double lambda = 0.0;
  /// Principal root; purely imaginary (positive) for negative lambda.
  cplx rho;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  Certification certification = Certification::kBracketed;
};

struct SpectralData {
  std::vector<EigenRecord> records;
  std::uint64_t fingerprint = 0;
  bool eigenparameter = false;

  std::vector<double> lambdas() const;
  std::vector<double> gammas() const;
};

/// W(phi, psi): -w(pi) L2(phi) for Robin problems and +w(pi) L2(phi) with
/// eigenparameter conditions.
cplx char_delta(const ValidatedProblem& p, cplx lambda, const PropagationOptions& options = {});

struct DeltaCrossCheck {
  cplx from_phi;       // -+w(pi) L2(phi)
  cplx from_psi;       // L1(psi)
  cplx from_interior;  // W(phi, psi) at the interior point
  double discrepancy;  // largest pairwise gap relative to max(1, |from_phi|)
};

/// All three forms of Delta; `interior` must lie in (0, pi).
DeltaCrossCheck char_delta_cross_check(const ValidatedProblem& p, cplx lambda, double interior = 1.0);

/// dDelta/dlambda from the variational system.
cplx char_delta_derivative(const ValidatedProblem& p, cplx lambda);

/// Delta and its derivative from one variational sweep.
std::pair<cplx, cplx> char_delta_with_derivative(const ValidatedProblem& p, cplx lambda);

struct EigenvalueOptions {
  /// Base scan step in s = sign(lambda) sqrt|lambda|.
  double scan_step = 0.05;
  /// How many times the scan is redone with half the step after a failed
  /// contour check.
  int retries = 3;
  bool verify = true;
};

/// Lower end of the eigenvalue scan.
double scan_floor(const ValidatedProblem& p);

/// The N lowest eigenvalues (lambda and rho filled). Throws
/// MissedEigenvalueError if the contour count keeps disagreeing.
SpectralData eigenvalues(const ValidatedProblem& p, std::size_t count, const EigenvalueOptions& options = {});

/// Eigenvalues of the Robin problem with the left condition replaced by
/// y'(0) + k y(0) = 0, or y(0) = 0 when k is infinite. VariantError for
/// eigenparameter problems.
SpectralData secondary_eigenvalues(const ValidatedProblem& p, double k, std::size_t count,
                                   const EigenvalueOptions& options = {});

/// Delta of the secondary problem (left condition y'(0) + k y(0) = 0, or
/// y(0) = 0 for infinite k). VariantError for eigenparameter problems.
cplx secondary_delta(const ValidatedProblem& p, double k, cplx lambda);

/// Relocates eigenvalues that moved only slightly from `seeds` (increasing
/// lambdas): each one is bracketed within a quarter of the local gap in
/// s = sign(lambda) sqrt|lambda| and polished. No contour check; records are
/// kBracketed. MissedEigenvalueError when a bracket has no sign change.
/// `secondary_k` selects the secondary problem.
SpectralData eigenvalues_from_seeds(const ValidatedProblem& p, const std::vector<double>& seeds,
                                    std::optional<double> secondary_k = std::nullopt);

struct Rectangle {
  double re_lo, re_hi, im_lo, im_hi;
};

/// Winding number of Delta around the rectangle. ContourTooCloseError when a
/// zero sits on (or within 1e-6 of) the boundary.
int count_zeros_contour(const ValidatedProblem& p, const Rectangle& r);

/// Same for an arbitrary entire function f.
int count_zeros_contour(const std::function<cplx(cplx)>& f, const Rectangle& r);

/// Fills gamma and beta for every record.
SpectralData spectral_data(const ValidatedProblem& p, SpectralData eigs);

/// Squared H-norm of phi(., lambda) for real lambda, including the boundary
/// terms in the eigenparameter case.
double phi_norm_sq(const ValidatedProblem& p, double lambda);

/// Text forms. Numbers use 17 significant digits. Negative lambda gives rho
/// as "<value>i".
std::string to_csv(const SpectralData& sd);
nlohmann::json to_json(const SpectralData& sd);
/// Reads the CSV form back; only n and lambda are required, gamma and beta
/// are read when present. ConfigParseError on malformed input.
SpectralData spectral_data_from_csv(const std::string& text);

}  // namespace jumpsl
