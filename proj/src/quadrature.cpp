#include "internal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "jumpsl/errors.hpp"

namespace jumpsl::internal {
namespace {

struct Piece {
  double value, err, l1;
};

// Boost reports the Kronrod/Gauss gap on the reference interval, so the
// estimate is rescaled by the half width here.
Piece adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  using boost::math::quadrature::gauss_kronrod;
  Piece out{};
  out.value = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &out.err, &out.l1);
  out.err *= 0.5 * (b - a);
  if (depth == 0 || out.err <= tol * out.l1) return out;
  const double mid = 0.5 * (a + b);
  const Piece l = adaptive(f, a, mid, tol, depth - 1);
  const Piece r = adaptive(f, mid, b, tol, depth - 1);
  return {l.value + r.value, l.err + r.err, l.l1 + r.l1};
}

}  // namespace

double weighted_integral(const ValidatedProblem& p, const std::function<double(double)>& f, double max_panel,
                         double tol) {
  double total = 0.0, total_abs = 0.0, total_err = 0.0;
  for (const auto& cell : p.cells()) {
    const double w = p.weights()[cell.segment];
    const int panels = std::max(1, static_cast<int>(std::ceil((cell.end - cell.start) / max_panel)));
    const double h = (cell.end - cell.start) / panels;
    for (int i = 0; i < panels; ++i) {
      const double a = cell.start + i * h;
      const double b = i + 1 == panels ? cell.end : a + h;
      const Piece piece = adaptive(f, a, b, tol * 0.1, 12);
      total += w * piece.value;
      total_abs += std::abs(w) * piece.l1;
      total_err += std::abs(w) * piece.err;
    }
  }
  if (!std::isfinite(total) || total_err > tol * (total_abs + 1e-300)) {
    throw QuadratureError("weighted integral did not reach the requested tolerance (estimate " +
                          std::to_string(total_err) + ")");
  }
  return total;
}

}  // namespace jumpsl::internal
