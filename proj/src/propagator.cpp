#include "jumpsl/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "jumpsl/errors.hpp"

namespace jumpsl {
namespace {

struct Mat2 {
  cplx a, b, c, d;  // [[a, b], [c, d]]
};

Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }
Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

// Lower nilpotent unit E = [[0, 0], [1, 0]] scaled by s.
Mat2 lower(cplx s) { return {0.0, 0.0, s, 0.0}; }

struct StepMatrices {
  Mat2 m;
  Mat2 dm;  // d/dlambda, only filled on request
};

// C(z) = cosh(sqrt z), S(z) = sinh(sqrt z)/sqrt z and S'(z); entire in z.
struct CoshSinh {
  cplx c, s, ds;
};

CoshSinh cosh_sinh(cplx z) {
  if (std::abs(z) < 0.5) {
    // Series in z; 14 terms is below 1e-17 for |z| < 0.5.
    cplx c = 0.0, s = 0.0, ds = 0.0, zk = 1.0;
    double fact_even = 1.0;  // (2k)!
    for (int k = 0; k < 14; ++k) {
      const double fact_odd = fact_even * (2 * k + 1);  // (2k+1)!
      c += zk / fact_even;
      s += zk / fact_odd;
      if (k + 1 < 14) ds += static_cast<double>(k + 1) * zk / (fact_odd * (2 * k + 2) * (2 * k + 3));
      zk *= z;
      fact_even = fact_odd * (2 * k + 2);
    }
    return {c, s, ds};
  }
  const cplx r = std::sqrt(z);
  const cplx c = std::cosh(r);
  const cplx s = std::sinh(r) / r;
  return {c, s, (c - s) / (2.0 * z)};
}

// One sixth-order Magnus step for Y' = [[0, 1], [q - lambda, 0]] Y over
// [x0, x0 + h] (h may be negative), with the exact lambda-derivative of the
// discrete step when requested.
StepMatrices magnus_step(const Cell& cell, double x0, double h, cplx lambda, bool derivative) {
  static const double s15 = std::sqrt(15.0);
  const double q1 = cell.q(x0 + (0.5 - s15 / 10.0) * h);
  const double q2 = cell.q(x0 + 0.5 * h);
  const double q3 = cell.q(x0 + (0.5 + s15 / 10.0) * h);

  const Mat2 alpha1{0.0, h, h * (q2 - lambda), 0.0};
  const Mat2 alpha2 = lower(s15 * h / 3.0 * (q3 - q1));
  const Mat2 alpha3 = lower(10.0 * h / 3.0 * (q3 - 2.0 * q2 + q1));
  const Mat2 c1 = commutator(alpha1, alpha2);
  const Mat2 c2 = cplx(-1.0 / 60.0) * commutator(alpha1, cplx(2.0) * alpha3 + c1);
  const Mat2 x = cplx(-20.0) * alpha1 - alpha3 + c1;
  const Mat2 y = alpha2 + c2;
  const Mat2 omega = alpha1 + cplx(1.0 / 12.0) * alpha3 + cplx(1.0 / 240.0) * commutator(x, y);

  // Omega is traceless, so Omega^2 = z I.
  const cplx a = 0.5 * (omega.a - omega.d);
  const cplx z = a * a + omega.b * omega.c;
  const auto cs = cosh_sinh(z);
  const Mat2 om{a, omega.b, omega.c, -a};
  StepMatrices out;
  out.m = Mat2{cs.c, 0.0, 0.0, cs.c} + cs.s * om;
  if (!derivative) return out;

  // Only alpha1 depends on lambda, and [E, alpha2] = [E, alpha3] = 0.
  const Mat2 d_alpha1 = lower(-h);
  const Mat2 d_c2 = cplx(-1.0 / 60.0) * commutator(d_alpha1, c1);
  const Mat2 d_x = cplx(-20.0) * d_alpha1;
  const Mat2 d_omega = d_alpha1 + cplx(1.0 / 240.0) * (commutator(d_x, y) + commutator(x, d_c2));
  const cplx da = 0.5 * (d_omega.a - d_omega.d);
  const Mat2 dom{da, d_omega.b, d_omega.c, -da};
  const cplx dz = 2.0 * a * da + d_omega.b * omega.c + omega.b * d_omega.c;
  const cplx dc = 0.5 * cs.s * dz;
  out.dm = Mat2{dc, 0.0, 0.0, dc} + (cs.ds * dz) * om + cs.s * dom;
  return out;
}

struct Work {
  cplx y, yp, dy, dyp;
};

Work apply(const StepMatrices& s, const Work& w, bool derivative) {
  Work out;
  out.y = s.m.a * w.y + s.m.b * w.yp;
  out.yp = s.m.c * w.y + s.m.d * w.yp;
  if (derivative) {
    out.dy = s.m.a * w.dy + s.m.b * w.dyp + s.dm.a * w.y + s.dm.b * w.yp;
    out.dyp = s.m.c * w.dy + s.m.d * w.dyp + s.dm.c * w.y + s.dm.d * w.yp;
  }
  return out;
}

Work jump_forward(const JumpCondition& j, const Work& w) {
  return {j.a * w.y, j.b * w.yp + j.c * w.y, j.a * w.dy, j.b * w.dyp + j.c * w.dy};
}

Work jump_backward(const JumpCondition& j, const Work& w) {
  const cplx y = w.y / j.a;
  const cplx dy = w.dy / j.a;
  return {y, (w.yp - j.c * y) / j.b, dy, (w.dyp - j.c * dy) / j.b};
}

struct NodeSink {
  virtual void push(double x, const Work& w) = 0;
  virtual ~NodeSink() = default;
};

class Integrator {
 public:
  Integrator(cplx lambda, double rho_scale, const PropagationOptions& options)
      : lambda_(lambda), scale_(rho_scale), opt_(options) {}

  // Integrates w across [from, to] inside a single cell.
  void run(const Cell& cell, double from, double to, Work& w, NodeSink* sink) {
    if (sink) sink->push(from, w);
    if (from == to) return;
    const double dir = to > from ? 1.0 : -1.0;
    double x = from;
    double h = dir * std::min(std::abs(to - from), hint_);
    double planned = std::abs(h);
    while (true) {
      bool last = false;
      if (std::abs(to - x) <= std::abs(h) * (1.0 + 1e-12)) {
        h = to - x;
        last = true;
      }
      if (++steps_ > opt_.max_steps) throw ToleranceError("step budget exhausted");
      const auto full = magnus_step(cell, x, h, lambda_, false);
      const auto half1 = magnus_step(cell, x, 0.5 * h, lambda_, opt_.variational);
      const auto half2 = magnus_step(cell, x + 0.5 * h, 0.5 * h, lambda_, opt_.variational);
      const Work coarse = apply(full, w, false);
      const Work fine = apply(half2, apply(half1, w, opt_.variational), opt_.variational);
      const double norm = std::abs(fine.y) * scale_ + std::abs(fine.yp);
      const double err =
          (std::abs(fine.y - coarse.y) * scale_ + std::abs(fine.yp - coarse.yp)) / std::max(norm, 1e-300);
      if (!std::isfinite(err)) throw ToleranceError("non-finite error estimate near x = " + std::to_string(x));
      if (err <= opt_.local_tolerance) {
        w = fine;
        x = last ? to : x + h;
        if (sink) sink->push(x, w);
        const double grow = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(opt_.local_tolerance / err, 1.0 / 7.0), 0.2, 4.0);
        planned = std::max(planned, std::abs(h));
        hint_ = (last ? planned : std::abs(h)) * grow;
        if (last) return;
        h = dir * std::abs(h) * grow;
        planned = std::abs(h);
      } else {
        const double shrink = std::clamp(0.9 * std::pow(opt_.local_tolerance / err, 1.0 / 7.0), 0.1, 0.9);
        h *= shrink;
        planned = std::abs(h);
        if (std::abs(h) < opt_.min_step)
          throw ToleranceError("step size collapsed below " + std::to_string(opt_.min_step) + " near x = " +
                               std::to_string(x));
      }
    }
  }

 private:
  cplx lambda_;
  double scale_;
  PropagationOptions opt_;
  double hint_ = 0.25;
  long steps_ = 0;
};

double rho_scale(const SpectralPoint& sp) { return std::max(1.0, std::abs(sp.rho)); }

Work to_work(const VariationalState& s) { return {s.value.y, s.value.yp, s.dy, s.dyp}; }

VariationalState to_state(const Work& w, double x) { return {{w.y, w.yp, x}, w.dy, w.dyp}; }

// Drives the integrator over all cells from the start point to the other end.
void sweep(const ValidatedProblem& p, const SpectralPoint& sp, Work& w, bool forward,
           const PropagationOptions& options, const std::function<NodeSink*(int)>& sink_for) {
  Integrator integrator(sp.lambda, rho_scale(sp), options);
  const auto cells = p.cells();
  const auto& jumps = p.jumps();
  const int n = static_cast<int>(cells.size());
  if (forward) {
    for (int i = 0; i < n; ++i) {
      integrator.run(cells[i], cells[i].start, cells[i].end, w, sink_for(i));
      if (cells[i].jump_after >= 0 && i + 1 < n) w = jump_forward(jumps[cells[i].jump_after], w);
    }
  } else {
    for (int i = n - 1; i >= 0; --i) {
      integrator.run(cells[i], cells[i].end, cells[i].start, w, sink_for(i));
      if (i > 0 && cells[i - 1].jump_after >= 0) w = jump_backward(jumps[cells[i - 1].jump_after], w);
    }
  }
}

}  // namespace

SpectralPoint SpectralPoint::from_lambda(cplx lambda) {
  cplx rho = std::sqrt(lambda);
  if (rho.real() == 0.0 && rho.imag() < 0.0) rho = -rho;
  return {lambda, rho, rho.imag()};
}

SpectralPoint SpectralPoint::from_rho(cplx rho) {
  if (rho.real() < 0.0 || (rho.real() == 0.0 && rho.imag() < 0.0)) rho = -rho;
  return {rho * rho, rho, rho.imag()};
}

const char* to_string(SolutionKind kind) {
  switch (kind) {
    case SolutionKind::kPhi: return "phi";
    case SolutionKind::kPsi: return "psi";
    case SolutionKind::kChi: return "chi";
    case SolutionKind::kTheta: return "theta";
    case SolutionKind::kCustom: return "custom";
  }
  return "custom";
}

StateVector apply_jump(const JumpCondition& j, const StateVector& left) {
  return {j.a * left.y, j.b * left.yp + j.c * left.y, left.x};
}

StateVector apply_jump_inverse(const JumpCondition& j, const StateVector& right) {
  const cplx y = right.y / j.a;
  return {y, (right.yp - j.c * y) / j.b, right.x};
}

StateVector propagate_interval(const ValidatedProblem& p, const SpectralPoint& sp, StateVector state,
                               double x_to, const PropagationOptions& options) {
  const double from = state.x;
  if (!(from >= 0.0 && from <= kPi) || !(x_to >= 0.0 && x_to <= kPi))
    throw DomainError("propagation endpoints must lie in [0, pi]");
  const double lo = std::min(from, x_to), hi = std::max(from, x_to);
  for (const auto& j : p.jumps())
    if (j.d > lo && j.d < hi) throw DomainError("interval straddles the jump at d = " + std::to_string(j.d));
  if (from == x_to) return state;

  const bool forward = x_to > from;
  // At a jump endpoint the cell on the side facing the interval applies.
  int cell = p.cell_of(from, forward ? Side::kRight : Side::kLeft);
  const auto cells = p.cells();
  PropagationOptions opt = options;
  opt.variational = false;
  Integrator integrator(sp.lambda, rho_scale(sp), opt);
  Work w{state.y, state.yp, 0.0, 0.0};
  double x = from;
  while (x != x_to) {
    const auto& c = cells[cell];
    const double target = forward ? std::min(c.end, x_to) : std::max(c.start, x_to);
    integrator.run(c, x, target, w, nullptr);
    x = target;
    cell += forward ? 1 : -1;
  }
  return {w.y, w.yp, x_to};
}

VariationalState initial_data(const ValidatedProblem& p, SolutionKind kind, cplx lambda) {
  if (!p.is_eigenparameter()) {
    const auto& r = p.robin();
    switch (kind) {
      case SolutionKind::kPhi: return {{1.0, -r.h, 0.0}, 0.0, 0.0};
      case SolutionKind::kPsi: return {{1.0, -r.H, kPi}, 0.0, 0.0};
      case SolutionKind::kChi: return {{0.0, 1.0, 0.0}, 0.0, 0.0};
      default: break;
    }
  } else {
    const auto& e = p.eigenparameter();
    switch (kind) {
      case SolutionKind::kPhi: return {{lambda - e.h2, e.h3 - lambda * e.h1, 0.0}, 1.0, -e.h1};
      case SolutionKind::kPsi: return {{e.H2 - lambda, lambda * e.H1 - e.H3, kPi}, -1.0, e.H1};
      case SolutionKind::kChi: return {{-1.0 / e.r1(), e.h1 / e.r1(), 0.0}, 0.0, 0.0};
      default: break;
    }
  }
  throw DomainError(std::string("no initial data for solution kind ") + to_string(kind));
}

PiecewiseSolution shoot(const ValidatedProblem& p, const SpectralPoint& sp, const VariationalState& start,
                        SolutionKind kind, const PropagationOptions& options) {
  const double x0 = start.value.x;
  if (x0 != 0.0 && x0 != kPi) throw DomainError("initial data must be given at 0 or pi");
  PiecewiseSolution sol;
  sol.kind_ = kind;
  sol.point_ = sp;
  sol.variational_ = options.variational;
  sol.cells_ = std::make_shared<const std::vector<Cell>>(p.cells().begin(), p.cells().end());
  sol.tracks_.resize(p.cells().size());

  struct Sink : NodeSink {
    PiecewiseSolution::Track* track = nullptr;
    void push(double x, const Work& w) override { track->nodes.push_back({x, w.y, w.yp, w.dy, w.dyp}); }
  };
  std::vector<Sink> sinks(sol.tracks_.size());
  for (std::size_t i = 0; i < sinks.size(); ++i) {
    sol.tracks_[i].cell = static_cast<int>(i);
    sinks[i].track = &sol.tracks_[i];
  }
  Work w = to_work(start);
  const bool forward = x0 == 0.0;
  sweep(p, sp, w, forward, options, [&](int i) -> NodeSink* { return &sinks[i]; });
  if (!forward)
    for (auto& t : sol.tracks_) std::reverse(t.nodes.begin(), t.nodes.end());
  return sol;
}

VariationalState shoot_to_end(const ValidatedProblem& p, const SpectralPoint& sp, const VariationalState& start,
                              const PropagationOptions& options) {
  const double x0 = start.value.x;
  if (x0 != 0.0 && x0 != kPi) throw DomainError("initial data must be given at 0 or pi");
  Work w = to_work(start);
  const bool forward = x0 == 0.0;
  sweep(p, sp, w, forward, options, [](int) -> NodeSink* { return nullptr; });
  return to_state(w, forward ? kPi : 0.0);
}

PiecewiseSolution fundamental_solution(const ValidatedProblem& p, SolutionKind kind, const SpectralPoint& sp,
                                       const PropagationOptions& options) {
  return shoot(p, sp, initial_data(p, kind, sp.lambda), kind, options);
}

int PiecewiseSolution::locate(double x, Side side) const {
  if (!(x >= 0.0 && x <= kPi)) throw DomainError("evaluation point outside [0, pi]");
  const auto& cells = *cells_;
  const auto it = std::upper_bound(cells.begin(), cells.end(), x, [](double v, const Cell& c) { return v < c.end; });
  if (it == cells.end()) return static_cast<int>(cells.size()) - 1;
  const int idx = static_cast<int>(it - cells.begin());
  if (idx > 0 && side == Side::kLeft && x == cells[idx - 1].end) return idx - 1;
  return idx;
}

const PiecewiseSolution::Node& PiecewiseSolution::nearest(int cell, double x) const {
  const auto& nodes = tracks_[cell].nodes;
  auto it = std::lower_bound(nodes.begin(), nodes.end(), x, [](const Node& n, double v) { return n.x < v; });
  if (it == nodes.end()) return nodes.back();
  if (it != nodes.begin() && (x - std::prev(it)->x) < (it->x - x)) return *std::prev(it);
  return *it;
}

VariationalState PiecewiseSolution::variational_at(double x, Side side) const {
  const int cell = locate(x, side);
  const Node& n = nearest(cell, x);
  if (n.x == x) return {{n.y, n.yp, x}, n.dy, n.dyp};
  const auto step = magnus_step((*cells_)[cell], n.x, x - n.x, point_.lambda, variational_);
  const Work w = apply(step, {n.y, n.yp, n.dy, n.dyp}, variational_);
  return {{w.y, w.yp, x}, w.dy, w.dyp};
}

StateVector PiecewiseSolution::at(double x, Side side) const { return variational_at(x, side).value; }

PiecewiseSolution PiecewiseSolution::scaled(cplx factor, SolutionKind kind) const {
  PiecewiseSolution out = *this;
  out.kind_ = kind;
  for (auto& t : out.tracks_)
    for (auto& n : t.nodes) {
      n.y *= factor;
      n.yp *= factor;
      n.dy *= factor;
      n.dyp *= factor;
    }
  return out;
}

std::size_t PiecewiseSolution::node_count() const {
  std::size_t total = 0;
  for (const auto& t : tracks_) total += t.nodes.size();
  return total;
}

cplx modified_wronskian(const ValidatedProblem& p, const PiecewiseSolution& u, const PiecewiseSolution& v,
                        double x, Side side) {
  if (u.point().lambda != v.point().lambda) throw MismatchError("solutions were computed at different lambda");
  const auto su = u.at(x, side);
  const auto sv = v.at(x, side);
  return weight_at(p, x, side) * (su.y * sv.yp - su.yp * sv.y);
}

}  // namespace jumpsl
