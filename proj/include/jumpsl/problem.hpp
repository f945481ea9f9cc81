#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace jumpsl {

inline constexpr double kPi = std::numbers::pi;

/// Transmission condition at an interior point d:
///   y(d+) = a y(d-),   y'(d+) = b y'(d-) + c y(d-).
struct JumpCondition {
  double d = 0.0;
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
};

/// y'(0) + h y(0) = 0,  y'(pi) + H y(pi) = 0.
struct RobinBoundary {
  double h = 0.0;
  double H = 0.0;
};

/// lambda (y'(0) + h1 y(0)) - h2 y'(0) - h3 y(0) = 0 and the analogue at pi
/// with (H1, H2, H3).
struct EigenparameterBoundary {
  double h1 = 0.0, h2 = 0.0, h3 = 0.0;
  double H1 = 0.0, H2 = 0.0, H3 = 0.0;

  double r1() const { return h3 - h1 * h2; }
  double r2() const { return H1 * H2 - H3; }
};

using BoundaryCondition = std::variant<RobinBoundary, EigenparameterBoundary>;

/// Polynomial pieces in the local variable (x - piece start). When `breaks`
/// is empty the pieces are the jump segments; otherwise `breaks` runs from 0
/// to pi and may contain points that are not jumps.
struct PiecewisePolynomial {
  std::vector<double> breaks;
  std::vector<std::vector<double>> coefficients;
};

/// Samples of q on a grid covering [0, pi]; order 0 (left-constant),
/// 1 (linear) or 3 (natural cubic spline).
struct SampledGrid {
  std::vector<double> x;
  std::vector<double> q;
  int order = 1;
};

using Potential = std::variant<PiecewisePolynomial, SampledGrid>;

struct ProblemSpec {
  Potential potential;
  BoundaryCondition boundary;
  std::vector<JumpCondition> jumps;
};

/// Constant potential, one polynomial piece per jump segment.
Potential constant_potential(double value, std::size_t jump_count);

/// Which one-sided limit to take when a position coincides with a jump point.
enum class Side { kRight, kLeft };

/// Smooth stretch of [0, pi] on which q is a single polynomial. Cells never
/// straddle a jump; `jump_after` is the index of the jump at `end`, or -1.
struct Cell {
  double start = 0.0;
  double end = 0.0;
  int segment = 0;
  int jump_after = -1;
  double origin = 0.0;
  std::vector<double> poly;

  double q(double x) const;
};

class ValidatedProblem {
 public:
  const ProblemSpec& spec() const { return spec_; }
  const std::vector<JumpCondition>& jumps() const { return spec_.jumps; }
  std::size_t segment_count() const { return weights_.size(); }

  bool is_eigenparameter() const {
    return std::holds_alternative<EigenparameterBoundary>(spec_.boundary);
  }
  const RobinBoundary& robin() const;
  const EigenparameterBoundary& eigenparameter() const;

  /// w_k = 1 / (a_1 b_1 ... a_k b_k) on segment k (0-based, w_0 = 1).
  std::span<const double> weights() const { return weights_; }
  std::span<const double> alpha() const { return alpha_; }
  std::span<const double> alpha_prime() const { return alpha_prime_; }
  std::span<const Cell> cells() const { return cells_; }

  /// Segment containing x; at a jump point `side` picks the limit.
  int segment_of(double x, Side side = Side::kRight) const;
  /// Cell containing x, same one-sided convention.
  int cell_of(double x, Side side = Side::kRight) const;

  double q(double x, Side side = Side::kRight) const;
  double max_abs_q() const { return max_abs_q_; }

  /// FNV-1a hash of the canonical text of the spec.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  friend ValidatedProblem validate(ProblemSpec spec);
  ValidatedProblem() = default;

  ProblemSpec spec_;
  std::vector<double> weights_;
  std::vector<double> alpha_;
  std::vector<double> alpha_prime_;
  std::vector<Cell> cells_;
  double max_abs_q_ = 0.0;
  std::uint64_t fingerprint_ = 0;
};

/// Checks every invariant and derives the weight, reflection coefficients and
/// integration cells. Throws JumpOrderError, JumpSignError,
/// BoundaryConstraintError or PotentialError.
ValidatedProblem validate(ProblemSpec spec);

/// Right limit at jump points unless `side` says otherwise. DomainError
/// outside [0, pi].
double weight_at(const ValidatedProblem& p, double x, Side side = Side::kRight);

/// Rescales by sqrt(w): a -> sgn(a) sqrt(a/b), b -> sgn(b) sqrt(b/a),
/// c -> c / sqrt(ab). The result has w = 1 and the same spectrum and m.
ValidatedProblem gauge_transform(const ValidatedProblem& p);

/// Deterministic text form used for hashing.
std::string canonical_text(const ProblemSpec& spec);

}  // namespace jumpsl
