#include "jumpsl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <boost/math/tools/toms748_solve.hpp>

#include "internal/format.hpp"
#include "internal/parallel.hpp"
#include "internal/quadrature.hpp"
#include "jumpsl/asymptotics.hpp"
#include "jumpsl/errors.hpp"

namespace jumpsl {
namespace {

using internal::fmt17;
using internal::parallel_for;

struct Functional {
  cplx value, derivative;
};

Functional right_functional(const ValidatedProblem& p, cplx lambda, const VariationalState& s) {
  const cplx y = s.value.y, yp = s.value.yp;
  if (!p.is_eigenparameter()) {
    const double H = p.robin().H;
    return {yp + H * y, s.dyp + H * s.dy};
  }
  const auto& e = p.eigenparameter();
  const cplx base = yp + e.H1 * y;
  return {lambda * base - e.H2 * yp - e.H3 * y,
          base + lambda * (s.dyp + e.H1 * s.dy) - e.H2 * s.dyp - e.H3 * s.dy};
}

Functional left_functional(const ValidatedProblem& p, cplx lambda, const StateVector& s) {
  if (!p.is_eigenparameter()) return {s.yp + p.robin().h * s.y, 0.0};
  const auto& e = p.eigenparameter();
  return {lambda * (s.yp + e.h1 * s.y) - e.h2 * s.yp - e.h3 * s.y, 0.0};
}

using StartFn = std::function<VariationalState(cplx)>;

Functional delta_from_start(const ValidatedProblem& p, cplx lambda, const StartFn& start, bool derivative,
                            const PropagationOptions& base = {}) {
  PropagationOptions opt = base;
  opt.variational = derivative;
  const auto end = shoot_to_end(p, SpectralPoint::from_lambda(lambda), start(lambda), opt);
  const auto f = right_functional(p, lambda, end);
  const double w = p.is_eigenparameter() ? p.weights().back() : -p.weights().back();
  return {w * f.value, w * f.derivative};
}

StartFn phi_start(const ValidatedProblem& p) {
  return [&p](cplx lambda) { return initial_data(p, SolutionKind::kPhi, lambda); };
}

StartFn secondary_start(const ValidatedProblem& p, double k) {
  if (p.is_eigenparameter()) throw VariantError("secondary spectra are defined for Robin problems only");
  if (std::isinf(k)) return [](cplx) { return VariationalState{{0.0, 1.0, 0.0}, 0.0, 0.0}; };
  return [k](cplx) { return VariationalState{{1.0, -k, 0.0}, 0.0, 0.0}; };
}

double lambda_of(double s) { return s * std::abs(s); }

double s_of(double lambda) { return lambda < 0 ? -std::sqrt(-lambda) : std::sqrt(lambda); }

// Sign-change scan in s with toms748 polishing; stops once `count` roots are
// known.
std::vector<double> scan_roots(const std::function<double(double)>& f, double s_floor, double step,
                               const std::vector<std::pair<double, double>>& tight, std::size_t count) {
  auto next_s = [&](double s) {
    for (const auto& [lo, hi] : tight)
      if (s >= lo && s < hi) return s + step / 4;
    return s + step;
  };
  std::vector<double> roots;
  const std::size_t chunk = 64;
  double s = s_floor;
  double fs = f(s);
  const double s_limit = s_floor + 40.0 * static_cast<double>(count) + 400.0;
  while (roots.size() < count && s < s_limit) {
    std::vector<double> grid(chunk);
    double t = s;
    for (auto& g : grid) g = t = next_s(t);
    std::vector<double> values(chunk);
    parallel_for(chunk, [&](std::size_t i) { values[i] = f(grid[i]); });

    std::vector<std::pair<std::size_t, bool>> brackets;  // (index of right end, exact zero at left end)
    double prev = fs;
    for (std::size_t i = 0; i < chunk; ++i) {
      if (prev == 0.0) {
        brackets.push_back({i, true});
      } else if (values[i] != 0.0 && (prev < 0) != (values[i] < 0)) {
        brackets.push_back({i, false});
      }
      prev = values[i];
    }
    std::vector<double> found(brackets.size());
    parallel_for(brackets.size(), [&](std::size_t k) {
      const auto [i, exact] = brackets[k];
      const double a = i == 0 ? s : grid[i - 1];
      const double fa = i == 0 ? fs : values[i - 1];
      if (exact) {
        found[k] = a;
        return;
      }
      std::uintmax_t iterations = 200;
      auto tol = [](double x, double y) { return std::abs(y - x) <= 2e-15 * std::max(1.0, std::abs(x)); };
      const auto r = boost::math::tools::toms748_solve(f, a, grid[i], fa, values[i], tol, iterations);
      found[k] = 0.5 * (r.first + r.second);
    });
    roots.insert(roots.end(), found.begin(), found.end());
    s = grid.back();
    fs = values.back();
  }
  if (roots.size() > count) roots.resize(count);
  return roots;
}

int winding(const std::function<cplx(cplx)>& f, const Rectangle& r, bool conjugate_symmetric);

SpectralData search(const ValidatedProblem& p, const StartFn& start_in, std::size_t count,
                    const EigenvalueOptions& options) {
  if (count == 0) throw DomainError("eigenvalue count must be at least 1");
  const StartFn start = start_in ? start_in : phi_start(p);
  auto delta = [&](cplx lambda) { return delta_from_start(p, lambda, start, false).value; };
  auto real_delta = [&](double s) { return delta(lambda_of(s)).real(); };

  const auto guesses = eigenvalue_guesses(p, count + 8);
  std::vector<std::pair<double, double>> tight;
  for (std::size_t i = 0; i + 1 < guesses.size(); ++i)
    if (guesses[i + 1] - guesses[i] < 0.25) tight.push_back({guesses[i] - 0.1, guesses[i + 1] + 0.1});

  double s_floor = s_of(scan_floor(p));
  double step = options.scan_step;
  for (int attempt = 0;; ++attempt) {
    const auto roots = scan_roots(real_delta, s_floor, step, tight, count + 1);
    if (roots.size() < count + 1) throw MissedEigenvalueError("scan ended before enough sign changes were found");
    SpectralData sd;
    sd.fingerprint = p.fingerprint();
    sd.eigenparameter = p.is_eigenparameter();
    for (std::size_t n = 0; n < count; ++n) {
      EigenRecord r;
      r.n = static_cast<int>(n);
      r.lambda = lambda_of(roots[n]);
      r.rho = SpectralPoint::from_lambda(r.lambda).rho;
      sd.records.push_back(r);
    }
    if (!options.verify) return sd;

    const double top = 0.5 * (lambda_of(roots[count - 1]) + lambda_of(roots[count]));
    const double left = -std::pow(2.0 * std::abs(s_floor) + 2.0, 2);
    const double height = std::max(1.0, std::sqrt(std::abs(top)));
    int counted = -1;
    try {
      counted = winding(delta, {left, top, -height, height}, true);
    } catch (const ContourTooCloseError&) {
      counted = -1;
    }
    if (counted == static_cast<int>(count)) {
      for (auto& r : sd.records) r.certification = Certification::kContourVerified;
      return sd;
    }
    if (attempt >= options.retries) {
      throw MissedEigenvalueError("contour count " + std::to_string(counted) + " disagrees with " +
                                  std::to_string(count) + " eigenvalues found by scanning");
    }
    step *= 0.5;
    s_floor *= 2.0;
  }
}

// Adaptive argument tracking along the segment z0 -> z1.
double arg_change(const std::function<cplx(cplx)>& f, cplx z0, cplx f0, cplx z1, cplx f1, int depth) {
  const double d = std::arg(f1 / f0);
  if (std::abs(d) <= std::numbers::pi / 4) return d;
  if (depth > 60 || std::abs(z1 - z0) < 1e-7 * std::max(1.0, std::abs(z0))) {
    throw ContourTooCloseError("a zero lies on or within 1e-6 of the contour near " + fmt17(z0.real()) + "+" +
                               fmt17(z0.imag()) + "i");
  }
  const cplx zm = 0.5 * (z0 + z1);
  const cplx fm = f(zm);
  if (fm == 0.0 || !std::isfinite(std::abs(fm))) throw ContourTooCloseError("function vanishes on the contour");
  return arg_change(f, z0, f0, zm, fm, depth + 1) + arg_change(f, zm, fm, z1, f1, depth + 1);
}

// Initial samples on an edge, spaced about 0.05 in rho.
std::vector<cplx> edge_samples(cplx z0, cplx z1) {
  std::vector<cplx> pts{z0};
  const double len = std::abs(z1 - z0);
  double t = 0.0;
  while (t < 1.0) {
    const cplx z = z0 + t * (z1 - z0);
    const double rho = std::max(1.0, std::sqrt(std::abs(z)));
    const double dz = 0.1 * rho;
    t = std::min(1.0, t + dz / len);
    pts.push_back(t >= 1.0 ? z1 : z0 + t * (z1 - z0));
  }
  return pts;
}

double path_arg_change(const std::function<cplx(cplx)>& f, const std::vector<cplx>& corners) {
  std::vector<cplx> pts;
  for (std::size_t e = 0; e + 1 < corners.size(); ++e) {
    auto edge = edge_samples(corners[e], corners[e + 1]);
    if (!pts.empty()) edge.erase(edge.begin());
    pts.insert(pts.end(), edge.begin(), edge.end());
  }
  std::vector<cplx> values(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = f(pts[i]); });
  for (const auto& v : values)
    if (v == 0.0 || !std::isfinite(std::abs(v))) throw ContourTooCloseError("function vanishes on the contour");
  std::vector<double> pieces(pts.size() - 1);
  parallel_for(pieces.size(), [&](std::size_t i) {
    pieces[i] = arg_change(f, pts[i], values[i], pts[i + 1], values[i + 1], 0);
  });
  double total = 0.0;
  for (double v : pieces) total += v;
  return total;
}

int winding(const std::function<cplx(cplx)>& f, const Rectangle& r, bool conjugate_symmetric) {
  if (!(r.re_lo < r.re_hi && r.im_lo < r.im_hi)) throw DomainError("degenerate contour rectangle");
  double total;
  if (conjugate_symmetric && r.im_lo == -r.im_hi) {
    total = 2.0 * path_arg_change(f, {cplx(r.re_hi, 0.0), cplx(r.re_hi, r.im_hi), cplx(r.re_lo, r.im_hi),
                                      cplx(r.re_lo, 0.0)});
  } else {
    total = path_arg_change(f, {cplx(r.re_lo, r.im_lo), cplx(r.re_hi, r.im_lo), cplx(r.re_hi, r.im_hi),
                                cplx(r.re_lo, r.im_hi), cplx(r.re_lo, r.im_lo)});
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-3) throw ContourTooCloseError("winding number is not an integer");
  return static_cast<int>(rounded);
}

std::string rho_text(const EigenRecord& r) {
  return r.lambda < 0 ? fmt17(r.rho.imag()) + "i" : fmt17(r.rho.real());
}

}  // namespace

const char* to_string(Certification c) {
  return c == Certification::kContourVerified ? "contour-verified" : "bracketed";
}

std::vector<double> SpectralData::lambdas() const {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.lambda);
  return out;
}

std::vector<double> SpectralData::gammas() const {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.gamma);
  return out;
}

cplx char_delta(const ValidatedProblem& p, cplx lambda, const PropagationOptions& options) {
  return delta_from_start(p, lambda, phi_start(p), false, options).value;
}

DeltaCrossCheck char_delta_cross_check(const ValidatedProblem& p, cplx lambda, double interior) {
  if (!(interior > 0.0 && interior < kPi)) throw DomainError("interior point must lie in (0, pi)");
  const auto sp = SpectralPoint::from_lambda(lambda);
  DeltaCrossCheck out;
  out.from_phi = char_delta(p, lambda);
  const auto psi0 = shoot_to_end(p, sp, initial_data(p, SolutionKind::kPsi, lambda));
  out.from_psi = left_functional(p, lambda, psi0.value).value;
  const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp);
  const auto psi = fundamental_solution(p, SolutionKind::kPsi, sp);
  out.from_interior = modified_wronskian(p, phi, psi, interior);
  const double scale = std::max(1.0, std::abs(out.from_phi));
  out.discrepancy = std::max({std::abs(out.from_phi - out.from_psi), std::abs(out.from_phi - out.from_interior),
                              std::abs(out.from_psi - out.from_interior)}) /
                    scale;
  return out;
}

std::pair<cplx, cplx> char_delta_with_derivative(const ValidatedProblem& p, cplx lambda) {
  const auto f = delta_from_start(p, lambda, phi_start(p), true);
  return {f.value, f.derivative};
}

cplx char_delta_derivative(const ValidatedProblem& p, cplx lambda) {
  return char_delta_with_derivative(p, lambda).second;
}

double scan_floor(const ValidatedProblem& p) {
  double gap = p.jumps().empty() ? kPi : p.jumps().front().d;
  for (std::size_t i = 0; i < p.jumps().size(); ++i) {
    const double next = i + 1 < p.jumps().size() ? p.jumps()[i + 1].d : kPi;
    gap = std::min(gap, next - p.jumps()[i].d);
  }
  double c_sum = 0.0;
  for (const auto& j : p.jumps()) c_sum += std::abs(j.c) / std::min({1.0, std::abs(j.a), std::abs(j.b)});
  double boundary = 0.0;
  if (p.is_eigenparameter()) {
    const auto& e = p.eigenparameter();
    boundary = std::abs(e.h1) + std::abs(e.h2) + std::abs(e.h3) + std::abs(e.H1) + std::abs(e.H2) +
               std::abs(e.H3) + 1.0 / e.r1() + 1.0 / e.r2();
  } else {
    boundary = std::abs(p.robin().h) + std::abs(p.robin().H);
  }
  const double s = 1.0 + p.max_abs_q() + c_sum / std::min(1.0, gap) + boundary;
  return -s * s;
}

SpectralData eigenvalues(const ValidatedProblem& p, std::size_t count, const EigenvalueOptions& options) {
  return search(p, nullptr, count, options);
}

SpectralData secondary_eigenvalues(const ValidatedProblem& p, double k, std::size_t count,
                                   const EigenvalueOptions& options) {
  return search(p, secondary_start(p, k), count, options);
}

cplx secondary_delta(const ValidatedProblem& p, double k, cplx lambda) {
  return delta_from_start(p, lambda, secondary_start(p, k), false).value;
}

SpectralData eigenvalues_from_seeds(const ValidatedProblem& p, const std::vector<double>& seeds,
                                    std::optional<double> secondary_k) {
  if (seeds.empty()) throw DomainError("no seeds given");
  const StartFn start = secondary_k ? secondary_start(p, *secondary_k) : phi_start(p);
  auto f = [&](double s) { return delta_from_start(p, lambda_of(s), start, false).value.real(); };
  std::vector<double> s(seeds.size());
  for (std::size_t n = 0; n < seeds.size(); ++n) {
    s[n] = s_of(seeds[n]);
    if (n > 0 && !(s[n] > s[n - 1])) throw DomainError("seeds must be strictly increasing");
  }
  SpectralData sd;
  sd.fingerprint = p.fingerprint();
  sd.eigenparameter = p.is_eigenparameter();
  sd.records.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t n) {
    double gap = INFINITY;
    if (n > 0) gap = s[n] - s[n - 1];
    if (n + 1 < s.size()) gap = std::min(gap, s[n + 1] - s[n]);
    if (std::isinf(gap)) gap = 1.0;
    const double half = 0.25 * gap;
    const double a = s[n] - half, b = s[n] + half;
    const double fa = f(a), fb = f(b);
    if (fa == 0.0 || fb == 0.0 || (fa < 0) == (fb < 0))
      throw MissedEigenvalueError("no sign change next to seed " + std::to_string(n));
    std::uintmax_t iterations = 200;
    auto tol = [](double x, double y) { return std::abs(y - x) <= 2e-15 * std::max(1.0, std::abs(x)); };
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iterations);
    auto& rec = sd.records[n];
    rec.n = static_cast<int>(n);
    rec.lambda = lambda_of(0.5 * (r.first + r.second));
    rec.rho = SpectralPoint::from_lambda(rec.lambda).rho;
  });
  return sd;
}

int count_zeros_contour(const ValidatedProblem& p, const Rectangle& r) {
  return winding([&p](cplx z) { return char_delta(p, z); }, r, true);
}

int count_zeros_contour(const std::function<cplx(cplx)>& f, const Rectangle& r) { return winding(f, r, false); }

double phi_norm_sq(const ValidatedProblem& p, double lambda) {
  const auto sp = SpectralPoint::from_lambda(lambda);
  const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp);
  const double panel = std::min(0.5, 1.0 / std::max(1.0, std::abs(sp.rho)));
  double norm = internal::weighted_integral(
      p, [&](double x) { return std::norm(phi.at(x).y); }, panel, 1e-10);
  if (p.is_eigenparameter()) {
    const auto& e = p.eigenparameter();
    const auto s0 = phi.at(0.0), s1 = phi.at(kPi, Side::kLeft);
    const double w0 = p.weights().front(), w1 = p.weights().back();
    norm += w0 / e.r1() * std::norm(s0.yp + e.h1 * s0.y);
    norm += w1 / e.r2() * std::norm(s1.yp + e.H1 * s1.y);
  }
  return norm;
}

SpectralData spectral_data(const ValidatedProblem& p, SpectralData eigs) {
  parallel_for(eigs.records.size(), [&](std::size_t i) {
    auto& r = eigs.records[i];
    const auto sp = SpectralPoint::from_lambda(r.lambda);
    const auto psi0 = shoot_to_end(p, sp, initial_data(p, SolutionKind::kPsi, r.lambda)).value;
    if (p.is_eigenparameter()) {
      const auto& e = p.eigenparameter();
      r.beta = ((psi0.yp + e.h1 * psi0.y) / e.r1()).real();
    } else {
      r.beta = psi0.y.real();
    }
    r.gamma = 1.0 / phi_norm_sq(p, r.lambda);
  });
  eigs.fingerprint = p.fingerprint();
  eigs.eigenparameter = p.is_eigenparameter();
  return eigs;
}

std::string to_csv(const SpectralData& sd) {
  std::string out = "n,lambda,rho,gamma,beta,certification";
  if (sd.eigenparameter) out += ",variant";
  out += "\n";
  for (const auto& r : sd.records) {
    out += std::to_string(r.n) + "," + fmt17(r.lambda) + "," + rho_text(r) + ",";
    if (!std::isnan(r.gamma)) out += fmt17(r.gamma);
    out += ",";
    if (!std::isnan(r.beta)) out += fmt17(r.beta);
    out += ",";
    out += to_string(r.certification);
    if (sd.eigenparameter) out += ",eigenparameter";
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const SpectralData& sd) {
  char fp[20];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(sd.fingerprint));
  nlohmann::json doc = {{"fingerprint", fp}, {"variant", sd.eigenparameter ? "eigenparameter" : "robin"}};
  doc["records"] = nlohmann::json::array();
  for (const auto& r : sd.records) {
    nlohmann::json rec = {{"n", r.n}, {"lambda", r.lambda}, {"certification", to_string(r.certification)}};
    if (r.lambda < 0)
      rec["rho"] = rho_text(r);
    else
      rec["rho"] = r.rho.real();
    rec["gamma"] = std::isnan(r.gamma) ? nlohmann::json(nullptr) : nlohmann::json(r.gamma);
    rec["beta"] = std::isnan(r.beta) ? nlohmann::json(nullptr) : nlohmann::json(r.beta);
    doc["records"].push_back(rec);
  }
  return doc;
}

SpectralData spectral_data_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigParseError("empty spectrum CSV");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int cn = column("n"), cl = column("lambda"), cg = column("gamma"), cb = column("beta"),
            cv = column("variant");
  if (cn < 0 || cl < 0) throw ConfigParseError("spectrum CSV needs columns n and lambda");
  SpectralData sd;
  auto number = [](const std::string& s, int row) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigParseError("bad number \"" + s + "\" in spectrum CSV row " + std::to_string(row));
    }
  };
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() < header.size()) throw ConfigParseError("short row " + std::to_string(row) + " in spectrum CSV");
    EigenRecord r;
    r.n = static_cast<int>(number(cells[cn], row));
    r.lambda = number(cells[cl], row);
    r.rho = SpectralPoint::from_lambda(r.lambda).rho;
    if (cg >= 0 && !cells[cg].empty()) r.gamma = number(cells[cg], row);
    if (cb >= 0 && !cells[cb].empty()) r.beta = number(cells[cb], row);
    if (cv >= 0 && cells[cv] == "eigenparameter") sd.eigenparameter = true;
    if (r.n != static_cast<int>(sd.records.size())) throw ConfigParseError("spectrum CSV indices must run 0, 1, 2, ...");
    sd.records.push_back(r);
  }
  return sd;
}

}  // namespace jumpsl
