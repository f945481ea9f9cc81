#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jumpsl/errors.hpp"
#include "jumpsl/problem.hpp"

namespace jumpsl {

enum class FitMode { kFullSpectral, kTwoSpectra, kHalfInverse };

const char* to_string(FitMode m);
FitMode fit_mode_from_string(const std::string& s);

enum class ParameterKind {
  kQCoefficient,     // q piece `index`, coefficient of (x - start)^power
  kRobinLeft,        // h
  kRobinRight,       // H
  kEigenparameter,   // index 0..5 = h1, h2, h3, H1, H2, H3
  kJumpC,            // c of jump `index`
  kJumpA,            // a of jump `index`, with b rescaled so a b (and w) stay fixed
  kJumpPosition,     // d of jump `index`; needs free_jump_positions
};

struct Unknown {
  ParameterKind kind = ParameterKind::kRobinLeft;
  int index = 0;
  int power = 0;
  double lower = -INFINITY;
  double upper = INFINITY;

  /// h, H, h1..H3, q<piece>_<power>, c<i>, a<i>, d<i> (0-based indices).
  std::string name() const;
};

/// Parses an unknown name. FitSpecError for anything that would free the
/// weight (w, b<i>) or is not a known parameter.
Unknown parse_unknown(const std::string& name);

struct FitTargets {
  std::vector<double> lambdas;
  std::vector<double> gammas;  // full_spectral
  std::vector<double> mus;     // two_spectra
};

struct ResidualWeights {
  double lambda = 1.0;
  double gamma = 1.0;
  double mu = 1.0;
};

struct FitSpec {
  FitMode mode = FitMode::kFullSpectral;
  /// Known data; the unknown entries hold the initial guess.
  ProblemSpec base;
  std::vector<Unknown> unknowns;
  FitTargets targets;
  /// Number of target entries used per list (N_target).
  std::size_t count = 30;
  /// Left condition of the second spectrum in two_spectra mode.
  double secondary_k = INFINITY;
  ResidualWeights weights;
  int max_iter = 100;
  /// Convergence tolerance on the step norm.
  double tol = 1e-10;
  bool free_jump_positions = false;
};

/// Checks the mask against the mode's hypotheses and the targets against
/// `count`. Throws FitSpecError; returns warnings (e.g. freed jump points).
std::vector<std::string> validate_fit_spec(const FitSpec& fs);

std::vector<double> initial_parameters(const FitSpec& fs);
/// The base spec with the unknowns replaced by `params`.
ProblemSpec apply_parameters(const FitSpec& fs, const std::vector<double>& params);

struct ResidualVector {
  std::vector<double> values;
  /// The forward solve failed; `values` holds a large constant instead.
  bool failed = false;
  std::string failure;

  double norm() const;
};

/// Scaled mismatches (lambda_n - lambda_n*)/(1 + |lambda_n*|), then
/// (gamma_n - gamma_n*)/gamma_n* or (mu_n - mu_n*)/(1 + |mu_n*|), n < count.
/// Forward-solve failures come back flagged, not thrown.
ResidualVector residuals(const FitSpec& fs, const std::vector<double>& params);

struct FitResult {
  std::optional<ValidatedProblem> recovered;
  std::vector<std::string> names;
  std::vector<double> parameters;
  ResidualVector residual;
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// |recovered - truth| per parameter when a truth vector was supplied.
  std::vector<double> parameter_errors;
};

class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, FitResult best)
      : Error("NonconvergenceError", what, "try a closer initial guess or a larger max_iter"),
        best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Levenberg-Marquardt over the forward map with a forward-difference
/// Jacobian, until the accepted step norm drops below fs.tol.
/// NonconvergenceError (carrying the best point) after max_iter.
FitResult fit(const FitSpec& fs, const std::vector<double>& initial,
              const std::optional<std::vector<double>>& truth = std::nullopt);
FitResult fit(const FitSpec& fs);

/// FitSpec file: {"mode", "unknowns": [...], "bounds": {name: [lo, hi]},
/// "initial": {name: value}, "targets_file", "secondary_targets_file",
/// "count", "max_iter", "tol", "free_jump_positions", "weights"}. Target
/// paths are relative to `base_dir`. ConfigParseError or FitSpecError.
FitSpec fit_spec_from_json(const nlohmann::json& doc, const ProblemSpec& base, const std::string& base_dir);

nlohmann::json fit_result_to_json(const FitResult& r);

}  // namespace jumpsl
