#include "jumpsl/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "internal/format.hpp"
#include "internal/quadrature.hpp"
#include "jumpsl/eigenparameter_bc.hpp"
#include "jumpsl/errors.hpp"

namespace jumpsl {
namespace {

using internal::fmt17;

cplx left_value_of_psi(const ValidatedProblem& p, const StateVector& psi0) {
  if (!p.is_eigenparameter()) return psi0.y;
  const auto& e = p.eigenparameter();
  return (psi0.yp + e.h1 * psi0.y) / e.r1();
}

void log_tail(double a, double b, cplx lambda, std::size_t from, std::size_t to, cplx& acc) {
  for (std::size_t n = from; n < to; ++n) {
    const double nb = n + b, na = n + a;
    acc += std::log((nb * nb - lambda) / (na * na - lambda));
  }
}

cplx log_product(const TwoSpectra& ts, cplx lambda, std::size_t N, double a, double b, std::size_t K) {
  cplx acc = 0.0;
  for (std::size_t n = 0; n < N; ++n) acc += std::log((ts.secondary[n] - lambda) / (ts.primary[n] - lambda));
  log_tail(a, b, lambda, N, K, acc);
  return acc;
}

}  // namespace

WeylSample weyl_m(const ValidatedProblem& p, cplx lambda) {
  const auto [delta, ddelta] = char_delta_with_derivative(p, lambda);
  if (delta == 0.0 || std::abs(delta) < 1e-10 * std::max(1.0, std::abs(lambda)) * std::abs(ddelta)) {
    throw PoleError("lambda = " + fmt17(lambda.real()) + (lambda.imag() < 0 ? "" : "+") + fmt17(lambda.imag()) +
                    "i is at an eigenvalue");
  }
  const auto sp = SpectralPoint::from_lambda(lambda);
  const auto psi0 = shoot_to_end(p, sp, initial_data(p, SolutionKind::kPsi, lambda)).value;
  WeylSample s;
  s.lambda = lambda;
  s.delta = delta;
  s.m = -left_value_of_psi(p, psi0) / delta;
  s.theta0 = psi0.y / delta;
  s.eigenparameter = p.is_eigenparameter();
  return s;
}

WeylTheta weyl_theta(const ValidatedProblem& p, double x, cplx lambda, Side side) {
  const auto sample = weyl_m(p, lambda);
  const auto sp = SpectralPoint::from_lambda(lambda);
  const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp).at(x, side);
  const auto chi = fundamental_solution(p, SolutionKind::kChi, sp).at(x, side);
  const auto psi = fundamental_solution(p, SolutionKind::kPsi, sp).at(x, side);
  WeylTheta out;
  out.theta = psi.y / sample.delta;
  out.theta_prime = psi.yp / sample.delta;
  const cplx other = chi.y - sample.m * phi.y;
  const cplx other_prime = chi.yp - sample.m * phi.yp;
  const double scale = std::max({1.0, std::abs(out.theta), std::abs(out.theta_prime)});
  out.discrepancy = std::max(std::abs(out.theta - other), std::abs(out.theta_prime - other_prime)) / scale;
  return out;
}

PiecewiseSolution weyl_solution(const ValidatedProblem& p, cplx lambda) {
  const auto sample = weyl_m(p, lambda);
  const auto psi = fundamental_solution(p, SolutionKind::kPsi, SpectralPoint::from_lambda(lambda));
  return psi.scaled(1.0 / sample.delta, SolutionKind::kTheta);
}

double weyl_solution_norm_sq(const ValidatedProblem& p, cplx lambda) {
  auto theta = weyl_solution(p, lambda);
  if (p.is_eigenparameter()) return vector_norm_sq(p, VectorState::of(p, std::move(theta)));
  const double panel = std::min(0.5, 1.0 / std::max(1.0, std::abs(theta.point().rho)));
  return internal::weighted_integral(p, [&](double x) { return std::norm(theta.at(x).y); }, panel, 1e-10);
}

cplx partial_fraction_m(const SpectralData& sd, cplx lambda, std::size_t N) {
  if (N > sd.records.size()) throw DomainError("truncation exceeds the available spectral records");
  cplx sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const auto& r = sd.records[n];
    if (std::isnan(r.gamma)) throw DomainError("spectral data has no norming constants");
    if (std::abs(lambda - r.lambda) < 1e-10 * std::max(1.0, std::abs(r.lambda)))
      throw PoleError("lambda coincides with lambda_" + std::to_string(n));
    sum += r.gamma / (r.lambda - lambda);
  }
  return sum;
}

void check_interlacing(const TwoSpectra& ts) {
  const auto& l = ts.primary;
  const auto& u = ts.secondary;
  for (std::size_t n = 0; n < l.size() && n < u.size(); ++n) {
    if (!(l[n] < u[n])) throw InterlacingError("lambda_" + std::to_string(n) + " >= mu_" + std::to_string(n));
    if (n + 1 < l.size() && !(u[n] < l[n + 1]))
      throw InterlacingError("mu_" + std::to_string(n) + " >= lambda_" + std::to_string(n + 1));
  }
}

TwoSpectraValue m_from_two_spectra(const TwoSpectra& ts, cplx lambda, std::size_t N) {
  if (!std::isinf(ts.k)) throw DomainError("two-spectra reconstruction is implemented for k = infinity only");
  if (N < 2 || N > ts.primary.size() || N > ts.secondary.size())
    throw DomainError("truncation N must be at least 2 and within both spectra");
  check_interlacing(ts);
  for (std::size_t n = 0; n < N; ++n) {
    if (std::abs(lambda - ts.primary[n]) < 1e-10 * std::max(1.0, std::abs(ts.primary[n])))
      throw PoleError("lambda coincides with lambda_" + std::to_string(n));
  }
  // Offsets averaged over the last quarter: with jumps the individual
  // offsets oscillate around their mean.
  const std::size_t window = std::max<std::size_t>(1, N / 4);
  double a = 0.0, b = 0.0;
  for (std::size_t n = N - window; n < N; ++n) {
    if (ts.primary[n] <= 0.0) throw DomainError("the tail window needs positive eigenvalues; increase N");
    a += std::sqrt(ts.primary[n]) - static_cast<double>(n);
    b += std::sqrt(ts.secondary[n]) - static_cast<double>(n);
  }
  a /= static_cast<double>(window);
  b /= static_cast<double>(window);
  const std::size_t K = 1000 * N;

  auto calibrated = [&](double cal) {
    const cplx diff = log_product(ts, lambda, N, a, b, K) - log_product(ts, cal, N, a, b, K) +
                      (b - a) * (lambda - cal) / (static_cast<double>(K) * K);
    return std::exp(diff) / std::sqrt(-cal);
  };
  const double n4 = 4.0 * N, n8 = 8.0 * N;
  TwoSpectraValue out;
  out.m = calibrated(-n4 * n4);
  out.alternate = calibrated(-n8 * n8);
  out.calibration_shift = std::abs(out.m - out.alternate);
  if (!std::isfinite(out.calibration_shift) || out.calibration_shift > 1e-3 * std::max(1.0, std::abs(out.m))) {
    throw CalibrationError("calibration shift " + fmt17(out.calibration_shift) + " exceeds 1e-3");
  }
  return out;
}

std::string weyl_samples_csv(const std::vector<WeylSample>& samples) {
  std::string out = "re_lambda,im_lambda,re_m,im_m\n";
  for (const auto& s : samples) {
    out += fmt17(s.lambda.real()) + "," + fmt17(s.lambda.imag()) + "," + fmt17(s.m.real()) + "," +
           fmt17(s.m.imag()) + "\n";
  }
  return out;
}

}  // namespace jumpsl
