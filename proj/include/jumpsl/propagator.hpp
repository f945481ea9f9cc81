#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "jumpsl/problem.hpp"

namespace jumpsl {

using cplx = std::complex<double>;

/// lambda together with its principal square root rho (Re rho >= 0; on the
/// negative axis rho = i|rho|) and tau = Im rho.
struct SpectralPoint {
  cplx lambda;
  cplx rho;
  double tau = 0.0;

  static SpectralPoint from_lambda(cplx lambda);
  static SpectralPoint from_rho(cplx rho);
};

/// Cauchy data (y, y') at position x.
struct StateVector {
  cplx y;
  cplx yp;
  double x = 0.0;
};

/// Cauchy data and its lambda-derivative, for the variational system.
struct VariationalState {
  StateVector value;
  cplx dy;
  cplx dyp;
};

enum class SolutionKind { kPhi, kPsi, kChi, kTheta, kCustom };

const char* to_string(SolutionKind kind);

struct PropagationOptions {
  /// Step-doubling tolerance on the scaled local error.
  double local_tolerance = 1e-13;
  double min_step = 1e-10;
  long max_steps = 2'000'000;
  /// Also integrate the lambda-derivative of the solution.
  bool variational = false;
};

/// A solution of -y'' + q y = lambda y satisfying every transmission
/// condition, stored as accepted-step nodes per cell. Evaluation between
/// nodes re-steps from the nearest node, so dense output has the same
/// accuracy as the integration itself.
class PiecewiseSolution {
 public:
  SolutionKind kind() const { return kind_; }
  const SpectralPoint& point() const { return point_; }
  bool has_derivative() const { return variational_; }

  /// Value and derivative at x; at jump points `side` selects the limit.
  StateVector at(double x, Side side = Side::kRight) const;
  /// Same, plus the lambda-derivative (requires `has_derivative()`).
  VariationalState variational_at(double x, Side side = Side::kRight) const;

  /// The solution multiplied by a constant, relabelled.
  PiecewiseSolution scaled(cplx factor, SolutionKind kind) const;

  std::size_t node_count() const;

 private:
  friend PiecewiseSolution shoot(const ValidatedProblem&, const SpectralPoint&, const VariationalState&,
                                 SolutionKind, const PropagationOptions&);

  struct Node {
    double x;
    cplx y, yp, dy, dyp;
  };
  struct Track {
    int cell;
    std::vector<Node> nodes;  // ascending x, endpoints included
  };

  SolutionKind kind_ = SolutionKind::kCustom;
  SpectralPoint point_;
  bool variational_ = false;
  std::shared_ptr<const std::vector<Cell>> cells_;
  std::vector<Track> tracks_;  // indexed by cell
  const Node& nearest(int cell, double x) const;
  int locate(double x, Side side) const;
};

/// Integrates from state.x to x_to inside one jump segment (forward or
/// backward). DomainError if the interval contains a jump point in its
/// interior; ToleranceError if step control collapses.
StateVector propagate_interval(const ValidatedProblem& p, const SpectralPoint& sp, StateVector state,
                               double x_to, const PropagationOptions& options = {});

/// (y, y') at d- to (a y, b y' + c y) at d+.
StateVector apply_jump(const JumpCondition& j, const StateVector& left);
/// Solves the same two equations for the left state.
StateVector apply_jump_inverse(const JumpCondition& j, const StateVector& right);

/// Integrates an initial value problem given at x = 0 (forward) or x = pi
/// (backward) across the whole interval, applying transmission conditions.
PiecewiseSolution shoot(const ValidatedProblem& p, const SpectralPoint& sp, const VariationalState& start,
                        SolutionKind kind = SolutionKind::kCustom, const PropagationOptions& options = {});

/// Initial data of phi, psi or chi for the problem's boundary variant.
VariationalState initial_data(const ValidatedProblem& p, SolutionKind kind, cplx lambda);

/// phi and chi start at 0, psi at pi.
PiecewiseSolution fundamental_solution(const ValidatedProblem& p, SolutionKind kind, const SpectralPoint& sp,
                                       const PropagationOptions& options = {});

/// w(x) (u v' - u' v). MismatchError if u and v live at different lambda.
cplx modified_wronskian(const ValidatedProblem& p, const PiecewiseSolution& u, const PiecewiseSolution& v,
                        double x, Side side = Side::kRight);

/// Final state only, without storing nodes: value at pi when starting at 0
/// and at 0 when starting at pi (right/left limits respectively).
VariationalState shoot_to_end(const ValidatedProblem& p, const SpectralPoint& sp, const VariationalState& start,
                              const PropagationOptions& options = {});

}  // namespace jumpsl
