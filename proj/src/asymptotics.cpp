#include "jumpsl/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "jumpsl/errors.hpp"
#include "jumpsl/spectrum.hpp"

namespace jumpsl {

std::vector<ReflectionTerm> reflection_terms(const ValidatedProblem& p, int segment) {
  if (segment < 0 || segment > static_cast<int>(p.jumps().size()))
    throw DomainError("segment index out of range");
  const auto alpha = p.alpha();
  const auto alpha_prime = p.alpha_prime();
  std::vector<ReflectionTerm> out;
  const unsigned count = 1u << segment;
  out.reserve(count);
  for (unsigned mask = 0; mask < count; ++mask) {
    ReflectionTerm t;
    t.mask = mask;
    t.coefficient = 1.0;
    for (int i = 0; i < segment; ++i) {
      if (mask & (1u << i)) {
        t.subset.push_back(i);
        t.coefficient *= alpha_prime[i];
      } else {
        t.coefficient *= alpha[i];
      }
    }
    const int size = static_cast<int>(t.subset.size());
    for (int l = 0; l < size; ++l) {
      const double sign = (size - l) % 2 == 1 ? -1.0 : 1.0;
      t.phase += 2.0 * sign * p.jumps()[t.subset[l]].d;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::complex<double> asymptotic_eval(const ValidatedProblem& p, AsymptoticTarget target, double x,
                                     std::complex<double> rho) {
  if (rho == 0.0) throw DomainError("asymptotic expansion needs rho != 0");
  int segment = static_cast<int>(p.jumps().size());
  if (target == AsymptoticTarget::kDelta) {
    x = kPi;
  } else {
    if (!(x >= 0.0 && x <= kPi)) throw DomainError("x outside [0, pi]");
    for (const auto& j : p.jumps())
      if (x == j.d) throw DomainError("asymptotic expansion is not defined at a jump point");
    segment = p.segment_of(x);
  }
  std::complex<double> sum = 0.0;
  for (const auto& t : reflection_terms(p, segment)) {
    const std::complex<double> arg = rho * (x + t.phase);
    sum += t.coefficient * (target == AsymptoticTarget::kPhi ? std::cos(arg) : std::sin(arg));
  }
  const bool eig = p.is_eigenparameter();
  switch (target) {
    case AsymptoticTarget::kPhi: return eig ? rho * rho * sum : sum;
    case AsymptoticTarget::kPhiPrime: return -(eig ? rho * rho * rho : rho) * sum;
    case AsymptoticTarget::kDelta: {
      const double w = p.weights().back();
      return eig ? -w * std::pow(rho, 5) * sum : w * rho * sum;
    }
  }
  return sum;
}

double asymptotic_sine_sum(const ValidatedProblem& p, double rho) {
  double sum = 0.0;
  for (const auto& t : reflection_terms(p, static_cast<int>(p.jumps().size())))
    sum += t.coefficient * std::sin(rho * (kPi + t.phase));
  return sum;
}

std::vector<double> eigenvalue_guesses(const ValidatedProblem& p, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  out.push_back(0.0);
  const auto terms = reflection_terms(p, static_cast<int>(p.jumps().size()));
  auto f = [&](double r) {
    double s = 0.0;
    for (const auto& t : terms) s += t.coefficient * std::sin(r * (kPi + t.phase));
    return s;
  };
  const double step = 0.05;
  double r0 = step, f0 = f(r0);
  const double limit = 10.0 * static_cast<double>(count) + 100.0;
  while (out.size() < count && r0 < limit) {
    const double r1 = r0 + step, f1 = f(r1);
    if (f0 == 0.0) {
      out.push_back(r0);
    } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
      double a = r0, b = r1, fa = f0;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    r0 = r1;
    f0 = f1;
  }
  return out;
}

std::vector<AsymptoticRow> asymptotic_report(const ValidatedProblem& p, const std::vector<double>& rhos) {
  std::vector<AsymptoticRow> rows;
  for (double r : rhos) {
    if (!(r > 0) || !std::isfinite(r)) throw DomainError("rho values must be positive");
    const std::complex<double> rho(r, 0.0);
    AsymptoticRow row;
    row.rho = r;
    row.delta = char_delta(p, rho * rho);
    row.delta_asymptotic = asymptotic_eval(p, AsymptoticTarget::kDelta, kPi, rho);
    const auto phi = fundamental_solution(p, SolutionKind::kPhi, SpectralPoint::from_rho(rho));
    const double scale = p.is_eigenparameter() ? 1.0 / r : r;
    for (int i = 0; i < 30; ++i) {
      const double x = (i + 0.5) * kPi / 30;
      const double err = std::abs(phi.at(x).y - asymptotic_eval(p, AsymptoticTarget::kPhi, x, rho));
      row.scaled_error = std::max(row.scaled_error, err * scale);
    }
    row.ratio = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : row.scaled_error / rows.back().scaled_error;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace jumpsl
