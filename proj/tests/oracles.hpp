#pragma once
// Test-only reference computations. Nothing here calls the propagator: the
// Taylor-series shooter re-expands each polynomial cell and sums the
// recursion for -y'' + q y = lambda y in long double.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "jumpsl/problem.hpp"

namespace oracle {

using lcplx = std::complex<long double>;
using jumpsl::kPi;

struct State {
  lcplx y, yp;
};

// Taylor coefficients of the cell polynomial around x0.
inline std::vector<long double> recentre(const jumpsl::Cell& cell, long double x0) {
  const auto& c = cell.poly;
  std::vector<long double> out(c.size(), 0.0L);
  const long double shift = x0 - cell.origin;
  // Binomial re-expansion of sum c_k (t + shift)^k.
  for (std::size_t k = 0; k < c.size(); ++k) {
    long double binom = 1.0L;  // C(k, j)
    for (std::size_t j = 0; j <= k; ++j) {
      out[j] += static_cast<long double>(c[k]) * binom * std::pow(shift, static_cast<long double>(k - j));
      binom = binom * static_cast<long double>(k - j) / static_cast<long double>(j + 1);
    }
  }
  return out;
}

// Advances (y, y') by t inside a cell with power series at x0.
inline State series_step(const jumpsl::Cell& cell, long double x0, long double t, lcplx lambda, State s) {
  const auto qc = recentre(cell, x0);
  std::vector<lcplx> c{s.y, s.yp};
  lcplx y = 0.0L, yp = 0.0L;
  long double tk = 1.0L;
  int small = 0;
  for (int k = 0; k < 4000; ++k) {
    if (k >= 2) {
      const int m = k - 2;
      lcplx acc = -lambda * c[m];
      for (int j = 0; j <= m && j < static_cast<int>(qc.size()); ++j) acc += qc[j] * c[m - j];
      c.push_back(acc / static_cast<long double>(k * (k - 1)));
    }
    y += c[k] * tk;
    if (k >= 1) yp += static_cast<long double>(k) * c[k] * (tk / t);
    const long double mag = std::abs(c[k] * tk) * (1.0L + k / std::abs(t));
    small = mag < 1e-28L * (std::abs(y) + std::abs(yp) + 1e-300L) ? small + 1 : 0;
    if (k > 8 && small > 3) break;
    tk *= t;
  }
  return {y, yp};
}

inline State integrate_cell(const jumpsl::Cell& cell, long double from, long double to, lcplx lambda, State s,
                            long double max_sub = 0.125L) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(to - from) / max_sub)));
  const long double h = (to - from) / n;
  for (int i = 0; i < n; ++i) s = series_step(cell, from + i * h, h, lambda, s);
  return s;
}

// Shoots from 0 to x (forward), applying transmission conditions, and
// returns the left limit at x unless right_limit is set.
inline State shoot_forward(const jumpsl::ValidatedProblem& p, lcplx lambda, State s, long double x,
                           bool right_limit = false) {
  for (const auto& cell : p.cells()) {
    if (x <= cell.start) break;
    const long double end = std::min<long double>(cell.end, x);
    s = integrate_cell(cell, cell.start, end, lambda, s);
    const bool reached_end = end == static_cast<long double>(cell.end);
    if (reached_end && cell.jump_after >= 0 && (x > cell.end || right_limit)) {
      const auto& j = p.jumps()[cell.jump_after];
      const long double a = j.a, b = j.b, c = j.c;
      s = {a * s.y, b * s.yp + c * s.y};
    }
  }
  return s;
}

inline State shoot_backward(const jumpsl::ValidatedProblem& p, lcplx lambda, State s, long double x,
                            bool left_limit = false) {
  const auto cells = p.cells();
  for (int i = static_cast<int>(cells.size()) - 1; i >= 0; --i) {
    const auto& cell = cells[i];
    if (x >= cell.end) break;
    const long double start = std::max<long double>(cell.start, x);
    s = integrate_cell(cell, cell.end, start, lambda, s);
    if (start == static_cast<long double>(cell.start) && i > 0 && cells[i - 1].jump_after >= 0 &&
        (x < cell.start || left_limit)) {
      const auto& j = p.jumps()[cells[i - 1].jump_after];
      const lcplx y = s.y / static_cast<long double>(j.a);
      s = {y, (s.yp - static_cast<long double>(j.c) * y) / static_cast<long double>(j.b)};
    }
  }
  return s;
}

// Robin characteristic function -w(pi) (phi'(pi) + H phi(pi)) by series.
inline lcplx robin_delta(const jumpsl::ValidatedProblem& p, lcplx lambda) {
  const auto& r = p.robin();
  const State end = shoot_forward(p, lambda, {1.0L, -r.h}, kPi);
  return -static_cast<long double>(p.weights().back()) * (end.yp + static_cast<long double>(r.H) * end.y);
}

// Sign-change scan on a uniform grid in s = sign(lambda) sqrt|lambda|,
// refined by bisection.
inline std::vector<double> brute_force_eigenvalues(const std::function<double(double)>& delta, double s_lo,
                                                   double s_hi, double ds, std::size_t count) {
  std::vector<double> out;
  auto lam = [](double s) { return s * std::abs(s); };
  double s0 = s_lo;
  double f0 = delta(lam(s0));
  while (s0 < s_hi && out.size() < count) {
    const double s1 = s0 + ds;
    const double f1 = delta(lam(s1));
    if (f0 == 0.0) {
      out.push_back(lam(s0));
    } else if ((f0 < 0) != (f1 < 0)) {
      double a = s0, b = s1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = delta(lam(mid));
        if ((fm < 0) == (fa < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      out.push_back(lam(0.5 * (a + b)));
    }
    s0 = s1;
    f0 = f1;
  }
  return out;
}

// Composite Gauss-Legendre (10 points) with `panels` equal panels.
inline double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  static const double nodes[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                  0.8650633666889845, 0.9739065285171717};
  static const double weights[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                    0.1494513491505806, 0.0666713443086881};
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h;
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
      acc += weights[k] * (f(mid - 0.5 * h * nodes[k]) + f(mid + 0.5 * h * nodes[k]));
    }
    total += 0.5 * h * acc;
  }
  return total;
}

}  // namespace oracle
