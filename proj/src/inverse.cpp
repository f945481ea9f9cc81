#include "jumpsl/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <Eigen/Dense>

#include "internal/parallel.hpp"
#include "jumpsl/config.hpp"
#include "jumpsl/spectrum.hpp"

namespace jumpsl {
namespace {

using nlohmann::json;

constexpr double kFailedResidual = 1e3;
const char* const kEigenNames[] = {"h1", "h2", "h3", "H1", "H2", "H3"};

double& eigen_slot(EigenparameterBoundary& e, int i) {
  double* slots[] = {&e.h1, &e.h2, &e.h3, &e.H1, &e.H2, &e.H3};
  return *slots[i];
}

bool parse_index(const std::string& text, int& out) {
  if (text.empty() || text.size() > 6) return false;
  for (char ch : text)
    if (ch < '0' || ch > '9') return false;
  out = std::stoi(text);
  return true;
}

std::vector<double> piece_starts(const ProblemSpec& spec) {
  const auto& pp = std::get<PiecewisePolynomial>(spec.potential);
  if (!pp.breaks.empty()) return {pp.breaks.begin(), pp.breaks.end() - 1};
  std::vector<double> starts{0.0};
  for (const auto& j : spec.jumps) starts.push_back(j.d);
  return starts;
}

double read_parameter(const ProblemSpec& spec, const Unknown& u) {
  switch (u.kind) {
    case ParameterKind::kQCoefficient: {
      const auto& c = std::get<PiecewisePolynomial>(spec.potential).coefficients.at(u.index);
      return u.power < static_cast<int>(c.size()) ? c[u.power] : 0.0;
    }
    case ParameterKind::kRobinLeft: return std::get<RobinBoundary>(spec.boundary).h;
    case ParameterKind::kRobinRight: return std::get<RobinBoundary>(spec.boundary).H;
    case ParameterKind::kEigenparameter: {
      auto e = std::get<EigenparameterBoundary>(spec.boundary);
      return eigen_slot(e, u.index);
    }
    case ParameterKind::kJumpC: return spec.jumps.at(u.index).c;
    case ParameterKind::kJumpA: return spec.jumps.at(u.index).a;
    case ParameterKind::kJumpPosition: return spec.jumps.at(u.index).d;
  }
  return 0.0;
}

void write_parameter(ProblemSpec& spec, const Unknown& u, double v) {
  switch (u.kind) {
    case ParameterKind::kQCoefficient: {
      auto& c = std::get<PiecewisePolynomial>(spec.potential).coefficients.at(u.index);
      if (u.power >= static_cast<int>(c.size())) c.resize(u.power + 1, 0.0);
      c[u.power] = v;
      return;
    }
    case ParameterKind::kRobinLeft: std::get<RobinBoundary>(spec.boundary).h = v; return;
    case ParameterKind::kRobinRight: std::get<RobinBoundary>(spec.boundary).H = v; return;
    case ParameterKind::kEigenparameter:
      eigen_slot(std::get<EigenparameterBoundary>(spec.boundary), u.index) = v;
      return;
    case ParameterKind::kJumpC: spec.jumps.at(u.index).c = v; return;
    case ParameterKind::kJumpA: {
      auto& j = spec.jumps.at(u.index);
      const double ab = j.a * j.b;
      j.a = v;
      j.b = ab / v;
      return;
    }
    case ParameterKind::kJumpPosition: spec.jumps.at(u.index).d = v; return;
  }
}

struct Forward {
  std::vector<double> lambdas, gammas, mus;
};

Forward solve(const FitSpec& fs, const ValidatedProblem& p, const Forward* seeds) {
  Forward out;
  const std::size_t n = fs.count;
  auto primary = [&] {
    if (seeds) {
      try {
        return eigenvalues_from_seeds(p, seeds->lambdas);
      } catch (const MissedEigenvalueError&) {
      }
    }
    return eigenvalues(p, n);
  };
  auto sd = primary();
  if (fs.mode == FitMode::kFullSpectral) sd = spectral_data(p, std::move(sd));
  out.lambdas = sd.lambdas();
  if (fs.mode == FitMode::kFullSpectral) out.gammas = sd.gammas();
  if (fs.mode == FitMode::kTwoSpectra) {
    SpectralData mu;
    bool done = false;
    if (seeds) {
      try {
        mu = eigenvalues_from_seeds(p, seeds->mus, fs.secondary_k);
        done = true;
      } catch (const MissedEigenvalueError&) {
      }
    }
    if (!done) mu = secondary_eigenvalues(p, fs.secondary_k, n);
    out.mus = mu.lambdas();
  }
  return out;
}

std::vector<double> scaled(const FitSpec& fs, const Forward& f) {
  std::vector<double> r;
  const auto& t = fs.targets;
  for (std::size_t n = 0; n < fs.count; ++n)
    r.push_back(fs.weights.lambda * (f.lambdas[n] - t.lambdas[n]) / (1.0 + std::abs(t.lambdas[n])));
  if (fs.mode == FitMode::kFullSpectral)
    for (std::size_t n = 0; n < fs.count; ++n)
      r.push_back(fs.weights.gamma * (f.gammas[n] - t.gammas[n]) / t.gammas[n]);
  if (fs.mode == FitMode::kTwoSpectra)
    for (std::size_t n = 0; n < fs.count; ++n)
      r.push_back(fs.weights.mu * (f.mus[n] - t.mus[n]) / (1.0 + std::abs(t.mus[n])));
  return r;
}

std::size_t residual_size(const FitSpec& fs) { return fs.mode == FitMode::kHalfInverse ? fs.count : 2 * fs.count; }

struct Evaluation {
  ResidualVector residual;
  std::optional<Forward> forward;
};

Evaluation evaluate(const FitSpec& fs, const std::vector<double>& params, const Forward* seeds) {
  Evaluation ev;
  try {
    const auto p = validate(apply_parameters(fs, params));
    ev.forward = solve(fs, p, seeds);
    ev.residual.values = scaled(fs, *ev.forward);
  } catch (const Error& e) {
    ev.forward.reset();
    ev.residual.values.assign(residual_size(fs), kFailedResidual);
    ev.residual.failed = true;
    ev.residual.failure = ForwardSolveError(e.name() + ": " + e.what()).what();
  }
  return ev;
}

std::vector<double> clamp_to_bounds(const FitSpec& fs, std::vector<double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], fs.unknowns[i].lower, fs.unknowns[i].upper);
  return x;
}

FitResult make_result(const FitSpec& fs, const std::vector<double>& x, ResidualVector r, double initial_norm,
                      int iterations, bool converged, const std::optional<std::vector<double>>& truth) {
  FitResult out;
  for (const auto& u : fs.unknowns) out.names.push_back(u.name());
  out.parameters = x;
  out.residual = std::move(r);
  out.residual_norm = out.residual.norm();
  out.initial_residual_norm = initial_norm;
  out.iterations = iterations;
  out.converged = converged;
  try {
    out.recovered = validate(apply_parameters(fs, x));
  } catch (const Error&) {
    out.recovered.reset();
  }
  if (truth)
    for (std::size_t i = 0; i < x.size(); ++i) out.parameter_errors.push_back(std::abs(x[i] - (*truth)[i]));
  return out;
}

}  // namespace

const char* to_string(FitMode m) {
  switch (m) {
    case FitMode::kFullSpectral: return "full_spectral";
    case FitMode::kTwoSpectra: return "two_spectra";
    case FitMode::kHalfInverse: return "half_inverse";
  }
  return "?";
}

FitMode fit_mode_from_string(const std::string& s) {
  if (s == "full_spectral") return FitMode::kFullSpectral;
  if (s == "two_spectra") return FitMode::kTwoSpectra;
  if (s == "half_inverse") return FitMode::kHalfInverse;
  throw FitSpecError("unknown fit mode \"" + s + "\"", "use full_spectral, two_spectra or half_inverse");
}

std::string Unknown::name() const {
  switch (kind) {
    case ParameterKind::kQCoefficient: return "q" + std::to_string(index) + "_" + std::to_string(power);
    case ParameterKind::kRobinLeft: return "h";
    case ParameterKind::kRobinRight: return "H";
    case ParameterKind::kEigenparameter: return kEigenNames[index];
    case ParameterKind::kJumpC: return "c" + std::to_string(index);
    case ParameterKind::kJumpA: return "a" + std::to_string(index);
    case ParameterKind::kJumpPosition: return "d" + std::to_string(index);
  }
  return "?";
}

Unknown parse_unknown(const std::string& name) {
  Unknown u;
  if (name == "w" || name == "weight" || (!name.empty() && name[0] == 'b' && name.size() > 1)) {
    throw FitSpecError("\"" + name + "\" would change the weight function, which must stay known",
                       "free a<i> instead; b<i> follows so that a*b is unchanged");
  }
  if (name == "h") {
    u.kind = ParameterKind::kRobinLeft;
    return u;
  }
  if (name == "H") {
    u.kind = ParameterKind::kRobinRight;
    return u;
  }
  for (int i = 0; i < 6; ++i) {
    if (name == kEigenNames[i]) {
      u.kind = ParameterKind::kEigenparameter;
      u.index = i;
      return u;
    }
  }
  if (name.size() > 1 && name[0] == 'q') {
    const auto sep = name.find('_');
    if (sep != std::string::npos && parse_index(name.substr(1, sep - 1), u.index) &&
        parse_index(name.substr(sep + 1), u.power)) {
      u.kind = ParameterKind::kQCoefficient;
      return u;
    }
  }
  if (name.size() > 1 && parse_index(name.substr(1), u.index)) {
    if (name[0] == 'c') {
      u.kind = ParameterKind::kJumpC;
      return u;
    }
    if (name[0] == 'a') {
      u.kind = ParameterKind::kJumpA;
      return u;
    }
    if (name[0] == 'd') {
      u.kind = ParameterKind::kJumpPosition;
      return u;
    }
  }
  throw FitSpecError("unknown parameter name \"" + name + "\"", "use h, H, h1..H3, q<piece>_<power>, c<i>, a<i>, d<i>");
}

std::vector<std::string> validate_fit_spec(const FitSpec& fs) {
  std::vector<std::string> warnings;
  if (fs.unknowns.empty()) throw FitSpecError("no unknowns selected");
  if (fs.count == 0) throw FitSpecError("count must be positive");
  if (residual_size(fs) < fs.unknowns.size())
    throw FitSpecError("fewer target values than unknowns", "raise count");
  if (!(fs.tol > 0) || fs.max_iter < 1) throw FitSpecError("tol must be positive and max_iter at least 1");

  const bool robin = std::holds_alternative<RobinBoundary>(fs.base.boundary);
  const auto* pp = std::get_if<PiecewisePolynomial>(&fs.base.potential);
  const double mid = kPi / 2;
  std::vector<double> starts;
  if (pp) starts = piece_starts(fs.base);

  for (std::size_t i = 0; i < fs.unknowns.size(); ++i) {
    const auto& u = fs.unknowns[i];
    const auto name = u.name();
    for (std::size_t k = 0; k < i; ++k)
      if (fs.unknowns[k].name() == name) throw FitSpecError("unknown \"" + name + "\" listed twice");
    if (!(u.lower < u.upper)) throw FitSpecError("empty bounds for \"" + name + "\"");
    switch (u.kind) {
      case ParameterKind::kQCoefficient:
        if (!pp) throw FitSpecError("q coefficients can only be fitted for piecewise_polynomial potentials");
        if (u.index >= static_cast<int>(pp->coefficients.size()))
          throw FitSpecError("\"" + name + "\" refers to a missing potential piece");
        if (fs.mode == FitMode::kHalfInverse && starts[u.index] < mid - 1e-12)
          throw FitSpecError("\"" + name + "\" lies in the left half, where q must be known",
                             "split the potential at pi/2 with breaks and free only right-half pieces");
        break;
      case ParameterKind::kRobinLeft:
      case ParameterKind::kRobinRight:
        if (!robin) throw FitSpecError("\"" + name + "\" needs Robin boundary conditions");
        if (fs.mode == FitMode::kHalfInverse && u.kind == ParameterKind::kRobinLeft)
          throw FitSpecError("h must be known in half_inverse mode");
        break;
      case ParameterKind::kEigenparameter:
        if (robin) throw FitSpecError("\"" + name + "\" needs eigenparameter boundary conditions");
        if (fs.mode == FitMode::kHalfInverse && u.index < 3)
          throw FitSpecError("h1, h2, h3 must be known in half_inverse mode");
        break;
      case ParameterKind::kJumpC:
      case ParameterKind::kJumpA:
      case ParameterKind::kJumpPosition:
        if (u.index >= static_cast<int>(fs.base.jumps.size()))
          throw FitSpecError("\"" + name + "\" refers to a missing jump");
        if (fs.mode == FitMode::kHalfInverse && fs.base.jumps[u.index].d < mid)
          throw FitSpecError("jump data left of pi/2 must be known in half_inverse mode");
        if (u.kind == ParameterKind::kJumpPosition) {
          if (!fs.free_jump_positions)
            throw FitSpecError("jump positions are known data", "set free_jump_positions to fit them");
          warnings.push_back("freeing " + name + " makes the least-squares landscape multimodal");
        }
        break;
    }
  }

  if (fs.mode == FitMode::kHalfInverse) {
    for (const auto& j : fs.base.jumps)
      if (std::abs(j.d - mid) < 1e-12) throw FitSpecError("half_inverse mode excludes a jump at pi/2");
  }
  if (fs.mode == FitMode::kTwoSpectra && !robin)
    throw FitSpecError("two_spectra mode needs Robin boundary conditions");

  const auto& t = fs.targets;
  if (t.lambdas.size() < fs.count) throw FitSpecError("fewer target eigenvalues than count");
  if (fs.mode == FitMode::kFullSpectral) {
    if (t.gammas.size() < fs.count) throw FitSpecError("full_spectral mode needs a norming constant per eigenvalue");
    for (std::size_t n = 0; n < fs.count; ++n)
      if (!(t.gammas[n] > 0)) throw FitSpecError("target norming constants must be positive");
  }
  if (fs.mode == FitMode::kTwoSpectra && t.mus.size() < fs.count)
    throw FitSpecError("two_spectra mode needs count secondary eigenvalues");

  const auto x = initial_parameters(fs);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < fs.unknowns[i].lower || x[i] > fs.unknowns[i].upper)
      throw FitSpecError("initial value of \"" + fs.unknowns[i].name() + "\" is outside its bounds");
  return warnings;
}

std::vector<double> initial_parameters(const FitSpec& fs) {
  std::vector<double> x;
  for (const auto& u : fs.unknowns) x.push_back(read_parameter(fs.base, u));
  return x;
}

ProblemSpec apply_parameters(const FitSpec& fs, const std::vector<double>& params) {
  if (params.size() != fs.unknowns.size()) throw FitSpecError("parameter vector has the wrong length");
  ProblemSpec spec = fs.base;
  for (std::size_t i = 0; i < params.size(); ++i) write_parameter(spec, fs.unknowns[i], params[i]);
  return spec;
}

double ResidualVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

ResidualVector residuals(const FitSpec& fs, const std::vector<double>& params) {
  return evaluate(fs, params, nullptr).residual;
}

FitResult fit(const FitSpec& fs) { return fit(fs, initial_parameters(fs)); }

FitResult fit(const FitSpec& fs, const std::vector<double>& initial, const std::optional<std::vector<double>>& truth) {
  validate_fit_spec(fs);
  const std::size_t np = fs.unknowns.size();
  if (initial.size() != np) throw FitSpecError("initial guess has the wrong length");
  for (std::size_t i = 0; i < np; ++i)
    if (initial[i] < fs.unknowns[i].lower || initial[i] > fs.unknowns[i].upper)
      throw FitSpecError("initial value of \"" + fs.unknowns[i].name() + "\" is outside its bounds");

  std::vector<double> x = initial;
  Evaluation cur = evaluate(fs, x, nullptr);
  const double initial_norm = cur.residual.norm();
  if (cur.residual.failed)
    throw NonconvergenceError("forward solve failed at the initial guess: " + cur.residual.failure,
                              make_result(fs, x, cur.residual, initial_norm, 0, false, truth));

  const std::size_t nr = cur.residual.values.size();
  double mu = -1.0;
  int iter = 0;
  bool converged = false;
  while (!converged && iter < fs.max_iter) {
    ++iter;
    if (cur.residual.norm() == 0.0) {
      converged = true;
      break;
    }
    Eigen::Map<const Eigen::VectorXd> r(cur.residual.values.data(), static_cast<Eigen::Index>(nr));
    Eigen::MatrixXd J(nr, np);
    std::vector<ResidualVector> columns(np);
    std::vector<double> steps(np);
    internal::parallel_for(np, [&](std::size_t j) {
      auto xj = x;
      double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      if (xj[j] + h > fs.unknowns[j].upper) h = -h;
      xj[j] += h;
      steps[j] = h;
      columns[j] = evaluate(fs, xj, &*cur.forward).residual;
    });
    for (std::size_t j = 0; j < np; ++j) {
      if (columns[j].failed) {
        J.col(j).setZero();
        continue;
      }
      for (std::size_t i = 0; i < nr; ++i) J(i, j) = (columns[j].values[i] - r(i)) / steps[j];
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd diag = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));
    if (mu < 0) mu = 1e-3;

    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      Eigen::MatrixXd M = A;
      M.diagonal() += mu * diag;
      const Eigen::VectorXd delta = M.ldlt().solve(-g);
      std::vector<double> trial(np);
      for (std::size_t i = 0; i < np; ++i) trial[i] = x[i] + delta(static_cast<Eigen::Index>(i));
      trial = clamp_to_bounds(fs, trial);
      double step = 0.0;
      for (std::size_t i = 0; i < np; ++i) step += (trial[i] - x[i]) * (trial[i] - x[i]);
      step = std::sqrt(step);
      if (step < fs.tol) {
        converged = true;
        break;
      }
      Evaluation next = evaluate(fs, trial, &*cur.forward);
      if (!next.residual.failed && next.residual.norm() < cur.residual.norm()) {
        x = std::move(trial);
        cur = std::move(next);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        if (step < fs.tol) converged = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted && !converged) break;
  }

  // Certify the final point with a contour-verified solve.
  Evaluation final_eval = evaluate(fs, x, nullptr);
  if (final_eval.residual.failed || final_eval.residual.norm() > cur.residual.norm() * 1.0001 + 1e-12)
    converged = false;
  auto result = make_result(fs, x, final_eval.residual.failed ? cur.residual : final_eval.residual, initial_norm, iter,
                            converged, truth);
  if (!converged)
    throw NonconvergenceError("no convergence after " + std::to_string(iter) + " iterations (residual norm " +
                                  std::to_string(result.residual_norm) + ")",
                              std::move(result));
  return result;
}

FitSpec fit_spec_from_json(const json& doc, const ProblemSpec& base, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigParseError("fit spec must be a JSON object");
  FitSpec fs;
  fs.base = base;
  try {
    fs.mode = fit_mode_from_string(doc.at("mode").get<std::string>());
    for (const auto& name : doc.at("unknowns")) fs.unknowns.push_back(parse_unknown(name.get<std::string>()));
    if (doc.contains("bounds")) {
      for (const auto& [name, range] : doc.at("bounds").items()) {
        auto it = std::find_if(fs.unknowns.begin(), fs.unknowns.end(), [&](const Unknown& u) { return u.name() == name; });
        if (it == fs.unknowns.end()) throw FitSpecError("bounds given for \"" + name + "\", which is not an unknown");
        if (!range.is_array() || range.size() != 2) throw ConfigParseError("bounds entries must be [lower, upper]");
        it->lower = range[0].get<double>();
        it->upper = range[1].get<double>();
      }
    }
    if (doc.contains("initial")) {
      for (const auto& [name, value] : doc.at("initial").items()) {
        auto it = std::find_if(fs.unknowns.begin(), fs.unknowns.end(), [&](const Unknown& u) { return u.name() == name; });
        if (it == fs.unknowns.end()) throw FitSpecError("initial value given for \"" + name + "\", which is not an unknown");
        write_parameter(fs.base, *it, value.get<double>());
      }
    }
    fs.count = doc.value("count", std::size_t{30});
    fs.max_iter = doc.value("max_iter", 100);
    fs.tol = doc.value("tol", 1e-10);
    fs.free_jump_positions = doc.value("free_jump_positions", false);
    if (doc.contains("weights")) {
      const auto& w = doc.at("weights");
      fs.weights.lambda = w.value("lambda", 1.0);
      fs.weights.gamma = w.value("gamma", 1.0);
      fs.weights.mu = w.value("mu", 1.0);
    }
    auto resolve = [&](const std::string& file) {
      const std::filesystem::path p(file);
      return (p.is_absolute() ? p : std::filesystem::path(base_dir) / p).string();
    };
    const auto primary = spectral_data_from_csv(read_text_file(resolve(doc.at("targets_file").get<std::string>())));
    fs.targets.lambdas = primary.lambdas();
    fs.targets.gammas = primary.gammas();
    if (doc.contains("secondary_targets_file")) {
      const auto secondary =
          spectral_data_from_csv(read_text_file(resolve(doc.at("secondary_targets_file").get<std::string>())));
      fs.targets.mus = secondary.lambdas();
    }
  } catch (const json::exception& e) {
    throw ConfigParseError(std::string("fit spec: ") + e.what());
  } catch (const std::bad_variant_access&) {
    throw FitSpecError("fit spec names a parameter the problem does not have");
  } catch (const std::out_of_range& e) {
    throw FitSpecError(std::string("fit spec refers to a missing piece or jump: ") + e.what());
  }
  return fs;
}

json fit_result_to_json(const FitResult& r) {
  json out;
  out["converged"] = r.converged;
  out["iterations"] = r.iterations;
  out["residual_norm"] = r.residual_norm;
  out["initial_residual_norm"] = r.initial_residual_norm;
  json params = json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) params[r.names[i]] = r.parameters[i];
  out["parameters"] = params;
  if (!r.parameter_errors.empty()) {
    json errs = json::object();
    for (std::size_t i = 0; i < r.names.size(); ++i) errs[r.names[i]] = r.parameter_errors[i];
    out["parameter_errors"] = errs;
  }
  if (r.recovered) out["problem"] = problem_to_json(r.recovered->spec());
  return out;
}

}  // namespace jumpsl
