#include "jumpsl/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "jumpsl/errors.hpp"

namespace jumpsl {
namespace {

constexpr double kSnap = 1e-12;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Snaps an endpoint within kSnap of 0 or pi onto the exact value.
std::vector<double> checked_grid(std::vector<double> grid, const char* what) {
  if (grid.size() < 2) throw PotentialError(std::string(what) + " needs at least two points");
  if (!all_finite(grid)) throw PotentialError(std::string(what) + " contains non-finite entries");
  if (std::abs(grid.front()) > kSnap || std::abs(grid.back() - kPi) > kSnap)
    throw PotentialError(std::string(what) + " must start at 0 and end at pi");
  grid.front() = 0.0;
  grid.back() = kPi;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw PotentialError(std::string(what) + " must be strictly increasing");
  return grid;
}

// Natural cubic spline second derivatives.
std::vector<double> spline_moments(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> diag(n, 2.0), upper(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    const double lo = h0 / (h0 + h1);
    upper[i] = h1 / (h0 + h1);
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) / (h0 + h1);
    // Thomas elimination folded into assembly; lo multiplies the previous row.
    if (i > 1) {
      const double f = lo / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    if (i == 1) break;
  }
  return m;
}

struct PotentialPiece {
  double start;
  double end;
  std::vector<double> poly;
};

std::vector<PotentialPiece> polynomial_pieces(const PiecewisePolynomial& pp,
                                              const std::vector<JumpCondition>& jumps) {
  std::vector<double> breaks;
  if (pp.breaks.empty()) {
    breaks.push_back(0.0);
    for (const auto& j : jumps) breaks.push_back(j.d);
    breaks.push_back(kPi);
  } else {
    breaks = checked_grid(pp.breaks, "polynomial breaks");
  }
  if (pp.coefficients.size() + 1 != breaks.size())
    throw PotentialError("expected " + std::to_string(breaks.size() - 1) +
                         " coefficient lists, got " + std::to_string(pp.coefficients.size()));
  std::vector<PotentialPiece> pieces;
  for (std::size_t i = 0; i < pp.coefficients.size(); ++i) {
    const auto& c = pp.coefficients[i];
    if (c.size() > 7) throw PotentialError("polynomial degree above 6 on piece " + std::to_string(i));
    if (!all_finite(c)) throw PotentialError("non-finite coefficient on piece " + std::to_string(i));
    pieces.push_back({breaks[i], breaks[i + 1], c.empty() ? std::vector<double>{0.0} : c});
  }
  return pieces;
}

std::vector<PotentialPiece> sampled_pieces(const SampledGrid& grid) {
  const auto x = checked_grid(grid.x, "sample abscissae");
  if (grid.q.size() != x.size()) throw PotentialError("sample abscissae and values differ in length");
  if (!all_finite(grid.q)) throw PotentialError("non-finite potential sample");
  if (grid.order != 0 && grid.order != 1 && grid.order != 3)
    throw PotentialError("interpolation order must be 0, 1 or 3");
  const auto& y = grid.q;
  std::vector<PotentialPiece> pieces;
  const auto moments = grid.order == 3 ? spline_moments(x, y) : std::vector<double>{};
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    std::vector<double> poly;
    switch (grid.order) {
      case 0:
        poly = {y[i]};
        break;
      case 1:
        poly = {y[i], (y[i + 1] - y[i]) / h};
        break;
      default: {
        const double m0 = moments[i], m1 = moments[i + 1];
        poly = {y[i], (y[i + 1] - y[i]) / h - h * (2.0 * m0 + m1) / 6.0, 0.5 * m0,
                (m1 - m0) / (6.0 * h)};
      }
    }
    pieces.push_back({x[i], x[i + 1], std::move(poly)});
  }
  return pieces;
}

void check_jumps(const std::vector<JumpCondition>& jumps) {
  double previous = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const auto& j = jumps[i];
    if (!std::isfinite(j.d) || !(j.d > previous) || !(j.d < kPi))
      throw JumpOrderError("jump " + std::to_string(i + 1) + " at d=" + fmt(j.d) +
                           " is not strictly inside (previous, pi)");
    previous = j.d;
    if (!std::isfinite(j.a) || !std::isfinite(j.b) || !std::isfinite(j.c))
      throw JumpSignError("jump " + std::to_string(i + 1) + " has non-finite parameters");
    if (!(j.a * j.b > 0.0))
      throw JumpSignError("jump " + std::to_string(i + 1) + " has a*b = " + fmt(j.a * j.b) + " <= 0");
  }
}

void check_boundary(const BoundaryCondition& bc) {
  if (const auto* r = std::get_if<RobinBoundary>(&bc)) {
    if (!std::isfinite(r->h) || !std::isfinite(r->H))
      throw BoundaryConstraintError("Robin parameters must be finite");
    return;
  }
  const auto& e = std::get<EigenparameterBoundary>(bc);
  for (double v : {e.h1, e.h2, e.h3, e.H1, e.H2, e.H3})
    if (!std::isfinite(v)) throw BoundaryConstraintError("eigenparameter data must be finite");
  if (!(e.r1() > 0.0)) throw BoundaryConstraintError("r1 = h3 - h1*h2 = " + fmt(e.r1()) + " <= 0");
  if (!(e.r2() > 0.0)) throw BoundaryConstraintError("r2 = H1*H2 - H3 = " + fmt(e.r2()) + " <= 0");
}

}  // namespace

double Cell::q(double x) const {
  const double t = x - origin;
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Potential constant_potential(double value, std::size_t jump_count) {
  PiecewisePolynomial pp;
  pp.coefficients.assign(jump_count + 1, std::vector<double>{value});
  return pp;
}

const RobinBoundary& ValidatedProblem::robin() const {
  if (const auto* r = std::get_if<RobinBoundary>(&spec_.boundary)) return *r;
  throw VariantError("problem has eigenparameter boundary conditions");
}

const EigenparameterBoundary& ValidatedProblem::eigenparameter() const {
  if (const auto* e = std::get_if<EigenparameterBoundary>(&spec_.boundary)) return *e;
  throw VariantError("problem has Robin boundary conditions");
}

int ValidatedProblem::segment_of(double x, Side side) const {
  if (!(x >= 0.0 && x <= kPi)) throw DomainError("position " + fmt(x) + " outside [0, pi]");
  int seg = 0;
  for (const auto& j : spec_.jumps) {
    if (x > j.d || (x == j.d && side == Side::kRight)) ++seg;
  }
  return seg;
}

int ValidatedProblem::cell_of(double x, Side side) const {
  if (!(x >= 0.0 && x <= kPi)) throw DomainError("position " + fmt(x) + " outside [0, pi]");
  const auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                                   [](double v, const Cell& c) { return v < c.end; });
  if (it == cells_.end()) return static_cast<int>(cells_.size()) - 1;
  const int idx = static_cast<int>(it - cells_.begin());
  if (idx > 0 && side == Side::kLeft && x == cells_[idx - 1].end) return idx - 1;
  return idx;
}

double ValidatedProblem::q(double x, Side side) const { return cells_[cell_of(x, side)].q(x); }

ValidatedProblem validate(ProblemSpec spec) {
  check_jumps(spec.jumps);
  check_boundary(spec.boundary);

  std::vector<PotentialPiece> pieces;
  if (const auto* pp = std::get_if<PiecewisePolynomial>(&spec.potential)) {
    pieces = polynomial_pieces(*pp, spec.jumps);
  } else {
    pieces = sampled_pieces(std::get<SampledGrid>(spec.potential));
  }

  ValidatedProblem p;
  p.weights_.push_back(1.0);
  for (const auto& j : spec.jumps) {
    p.weights_.push_back(p.weights_.back() / (j.a * j.b));
    p.alpha_.push_back(0.5 * (j.a + j.b));
    p.alpha_prime_.push_back(0.5 * (j.a - j.b));
  }

  std::vector<double> points{0.0, kPi};
  for (const auto& j : spec.jumps) points.push_back(j.d);
  for (const auto& piece : pieces) points.push_back(piece.start);
  std::sort(points.begin(), points.end());
  std::vector<double> merged;
  for (double v : points)
    if (merged.empty() || v - merged.back() > kSnap) merged.push_back(v);
  // Jump points win over nearby potential breaks.
  for (const auto& j : spec.jumps)
    for (double& v : merged)
      if (std::abs(v - j.d) <= kSnap) v = j.d;

  std::size_t piece = 0;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    Cell cell;
    cell.start = merged[i];
    cell.end = merged[i + 1];
    const double mid = 0.5 * (cell.start + cell.end);
    while (piece + 1 < pieces.size() && mid > pieces[piece].end) ++piece;
    cell.origin = pieces[piece].start;
    cell.poly = pieces[piece].poly;
    cell.segment = 0;
    for (std::size_t k = 0; k < spec.jumps.size(); ++k) {
      if (spec.jumps[k].d <= cell.start) cell.segment = static_cast<int>(k) + 1;
      if (spec.jumps[k].d == cell.end) cell.jump_after = static_cast<int>(k);
    }
    for (int s = 0; s <= 16; ++s)
      p.max_abs_q_ = std::max(p.max_abs_q_, std::abs(cell.q(cell.start + (cell.end - cell.start) * s / 16.0)));
    p.cells_.push_back(std::move(cell));
  }

  p.spec_ = std::move(spec);
  p.fingerprint_ = fnv1a(canonical_text(p.spec_));
  return p;
}

double weight_at(const ValidatedProblem& p, double x, Side side) {
  return p.weights()[p.segment_of(x, side)];
}

ValidatedProblem gauge_transform(const ValidatedProblem& p) {
  ProblemSpec spec = p.spec();
  for (auto& j : spec.jumps) {
    const double root = std::sqrt(j.a * j.b);
    const double a_hat = std::copysign(std::sqrt(j.a / j.b), j.a);
    const double b_hat = std::copysign(std::sqrt(j.b / j.a), j.b);
    j.c /= root;
    j.a = a_hat;
    j.b = b_hat;
  }
  return validate(std::move(spec));
}

std::string canonical_text(const ProblemSpec& spec) {
  std::string out;
  if (const auto* pp = std::get_if<PiecewisePolynomial>(&spec.potential)) {
    out += "poly;breaks=";
    for (double v : pp->breaks) out += fmt(v) + ",";
    for (const auto& c : pp->coefficients) {
      out += ";piece=";
      for (double v : c) out += fmt(v) + ",";
    }
  } else {
    const auto& g = std::get<SampledGrid>(spec.potential);
    out += "grid;order=" + std::to_string(g.order) + ";x=";
    for (double v : g.x) out += fmt(v) + ",";
    out += ";q=";
    for (double v : g.q) out += fmt(v) + ",";
  }
  if (const auto* r = std::get_if<RobinBoundary>(&spec.boundary)) {
    out += "|robin;" + fmt(r->h) + "," + fmt(r->H);
  } else {
    const auto& e = std::get<EigenparameterBoundary>(spec.boundary);
    out += "|eigen;" + fmt(e.h1) + "," + fmt(e.h2) + "," + fmt(e.h3) + "," + fmt(e.H1) + "," +
           fmt(e.H2) + "," + fmt(e.H3);
  }
  for (const auto& j : spec.jumps)
    out += "|jump;" + fmt(j.d) + "," + fmt(j.a) + "," + fmt(j.b) + "," + fmt(j.c);
  return out;
}

}  // namespace jumpsl
