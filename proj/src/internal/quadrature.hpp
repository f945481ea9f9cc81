#pragma once

#include <functional>

#include "jumpsl/problem.hpp"

namespace jumpsl::internal {

/// Integral of f(x) w(x) over [0, pi], split at every cell boundary and into
/// panels no longer than `max_panel`. Gauss-Kronrod on each panel; throws
/// QuadratureError when the error estimate exceeds tol * (|I| + floor).
double weighted_integral(const ValidatedProblem& p, const std::function<double(double)>& f, double max_panel,
                         double tol = 1e-11);

}  // namespace jumpsl::internal
