#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "internal/format.hpp"
#include "json.hpp"
#include "jumpsl/asymptotics.hpp"
#include "jumpsl/config.hpp"
#include "jumpsl/errors.hpp"
#include "jumpsl/inverse.hpp"
#include "jumpsl/spectrum.hpp"
#include "jumpsl/weyl.hpp"

namespace jumpsl::cli {
namespace {

using internal::fmt17;
using nlohmann::json;

struct Options {
  std::string config;
  std::string output;
  std::string format = "csv";
  std::size_t count = 20;
  std::string secondary;
  std::vector<std::string> lambdas;
  std::string grid;
  std::string rho = "40,80";
  std::string rect;
  std::string primary_csv, secondary_csv;
  std::size_t truncation = 100;
  std::string fit_spec, truth;
};

std::vector<double> number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigParseError(std::string("bad number \"") + item + "\" in " + what);
    }
  }
  if (out.empty()) throw ConfigParseError(std::string(what) + " is empty");
  return out;
}

double parse_k(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "dirichlet") return INFINITY;
  return number_list(text, "--secondary").at(0);
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_text_file_atomic(o.output, text);
  }
}

std::string spectrum_text(const Options& o, const SpectralData& sd) {
  if (o.format == "json") return to_json(sd).dump(2) + "\n";
  return to_csv(sd);
}

ValidatedProblem load(const Options& o) { return validate(load_problem(o.config)); }

std::vector<cplx> lambda_points(const Options& o) {
  std::vector<cplx> pts;
  for (const auto& l : o.lambdas) {
    const auto v = number_list(l, "--lambda");
    if (v.size() > 2) throw ConfigParseError("--lambda takes RE or RE,IM");
    pts.emplace_back(v[0], v.size() == 2 ? v[1] : 0.0);
  }
  if (!o.grid.empty()) {
    const auto g = number_list(o.grid, "--grid");
    if (g.size() != 6) throw ConfigParseError("--grid takes re_lo,re_hi,n_re,im_lo,im_hi,n_im");
    const int nre = static_cast<int>(g[2]), nim = static_cast<int>(g[5]);
    if (nre < 1 || nim < 1) throw ConfigParseError("--grid point counts must be positive");
    for (int j = 0; j < nim; ++j) {
      const double im = nim == 1 ? g[3] : g[3] + (g[4] - g[3]) * j / (nim - 1);
      for (int i = 0; i < nre; ++i) {
        const double re = nre == 1 ? g[0] : g[0] + (g[1] - g[0]) * i / (nre - 1);
        pts.emplace_back(re, im);
      }
    }
  }
  if (pts.empty()) throw ConfigParseError("give at least one --lambda or a --grid");
  return pts;
}

std::string cplx_cells(cplx z) { return fmt17(z.real()) + "," + fmt17(z.imag()); }

int cmd_eigs(const Options& o, std::ostream& out) {
  const auto p = load(o);
  const auto sd = o.secondary.empty() ? eigenvalues(p, o.count) : secondary_eigenvalues(p, parse_k(o.secondary), o.count);
  emit(o, spectrum_text(o, sd), out);
  return 0;
}

int cmd_spectral_data(const Options& o, std::ostream& out) {
  const auto p = load(o);
  emit(o, spectrum_text(o, spectral_data(p, eigenvalues(p, o.count))), out);
  return 0;
}

int cmd_weyl(const Options& o, std::ostream& out) {
  const auto p = load(o);
  std::vector<WeylSample> samples;
  for (cplx z : lambda_points(o)) samples.push_back(weyl_m(p, z));
  emit(o, weyl_samples_csv(samples), out);
  return 0;
}

int cmd_asym_check(const Options& o, std::ostream& out) {
  const auto p = load(o);
  std::string text = "rho,re_delta,im_delta,re_delta_asym,im_delta_asym,scaled_error,ratio\n";
  for (const auto& r : asymptotic_report(p, number_list(o.rho, "--rho"))) {
    text += fmt17(r.rho) + "," + cplx_cells(r.delta) + "," + cplx_cells(r.delta_asymptotic) + "," +
            fmt17(r.scaled_error) + "," + (std::isnan(r.ratio) ? std::string() : fmt17(r.ratio)) + "\n";
  }
  emit(o, text, out);
  return 0;
}

int cmd_gauge(const Options& o, std::ostream& out) {
  const auto g = gauge_transform(load(o));
  auto doc = problem_to_json(g.spec());
  doc["note"] = "w = 1 on every segment";
  emit(o, doc.dump(2) + "\n", out);
  return 0;
}

int cmd_two_spectra(const Options& o, std::ostream& out) {
  TwoSpectra ts;
  if (!o.config.empty()) {
    const auto p = load(o);
    ts.primary = eigenvalues(p, o.truncation).lambdas();
    ts.secondary = secondary_eigenvalues(p, INFINITY, o.truncation).lambdas();
  } else {
    if (o.primary_csv.empty() || o.secondary_csv.empty())
      throw ConfigParseError("two-spectra needs --config or both --primary and --secondary-spectrum");
    ts.primary = spectral_data_from_csv(read_text_file(o.primary_csv)).lambdas();
    ts.secondary = spectral_data_from_csv(read_text_file(o.secondary_csv)).lambdas();
  }
  std::string text = "re_lambda,im_lambda,re_m,im_m,calibration_shift\n";
  for (cplx z : lambda_points(o)) {
    const auto v = m_from_two_spectra(ts, z, o.truncation);
    text += cplx_cells(z) + "," + cplx_cells(v.m) + "," + fmt17(v.calibration_shift) + "\n";
  }
  emit(o, text, out);
  return 0;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  const auto base = load_problem(o.config);
  json doc;
  try {
    doc = json::parse(read_text_file(o.fit_spec));
  } catch (const json::parse_error& e) {
    throw ConfigParseError(o.fit_spec + ": " + e.what());
  }
  const auto dir = std::filesystem::path(o.fit_spec).parent_path().string();
  const auto fs = fit_spec_from_json(doc, base, dir.empty() ? "." : dir);
  for (const auto& w : validate_fit_spec(fs)) err << "warning: " << w << "\n";
  std::optional<std::vector<double>> truth;
  if (!o.truth.empty()) {
    FitSpec t = fs;
    t.base = load_problem(o.truth);
    truth = initial_parameters(t);
  }
  try {
    const auto r = fit(fs, initial_parameters(fs), truth);
    emit(o, fit_result_to_json(r).dump(2) + "\n", out);
  } catch (const NonconvergenceError& e) {
    emit(o, fit_result_to_json(e.best()).dump(2) + "\n", out);
    throw;
  }
  return 0;
}

int cmd_contour_count(const Options& o, std::ostream& out) {
  const auto p = load(o);
  const auto r = number_list(o.rect, "--rect");
  if (r.size() != 4) throw ConfigParseError("--rect takes re_lo,re_hi,im_lo,im_hi");
  if (!(r[0] < r[1]) || !(r[2] < r[3])) throw DomainError("--rect must have lo < hi on both axes");
  const int n = count_zeros_contour(p, {r[0], r[1], r[2], r[3]});
  emit(o, "re_lo,re_hi,im_lo,im_hi,zeros\n" + fmt17(r[0]) + "," + fmt17(r[1]) + "," + fmt17(r[2]) + "," +
              fmt17(r[3]) + "," + std::to_string(n) + "\n",
       out);
  return 0;
}

void check_threads_env() {
  const char* env = std::getenv("JUMPSL_THREADS");
  if (!env) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v <= 0)
    throw ConfigParseError(std::string("JUMPSL_THREADS must be a positive integer, got \"") + env + "\"");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sturm-Liouville problems with transmission conditions", "jumpsl"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_config = [&](CLI::App* sc, bool required = true) {
    auto* opt = sc->add_option("--config,-c", o.config, "problem JSON");
    if (required) opt->required();
    sc->add_option("--output,-o", o.output, "output file (default: stdout)");
  };

  auto* eigs = app.add_subcommand("eigs", "lowest eigenvalues");
  add_config(eigs);
  eigs->add_option("--count,-n", o.count, "number of eigenvalues")->check(CLI::PositiveNumber);
  eigs->add_option("--secondary", o.secondary, "left condition y'(0)+k y(0)=0 instead; 'inf' for y(0)=0");
  eigs->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* sdata = app.add_subcommand("spectral-data", "eigenvalues with norming constants");
  add_config(sdata);
  sdata->add_option("--count,-n", o.count)->check(CLI::PositiveNumber);
  sdata->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* weyl = app.add_subcommand("weyl", "Weyl function samples");
  add_config(weyl);
  weyl->add_option("--lambda,-l", o.lambdas, "RE or RE,IM (repeatable)");
  weyl->add_option("--grid", o.grid, "re_lo,re_hi,n_re,im_lo,im_hi,n_im");

  auto* asym = app.add_subcommand("asym-check", "exact against leading-order asymptotics");
  add_config(asym);
  asym->add_option("--rho", o.rho, "comma-separated rho values");

  auto* gauge = app.add_subcommand("gauge", "emit the gauge-transformed problem");
  add_config(gauge);

  auto* two = app.add_subcommand("two-spectra", "m from two spectra (y(0)=0 as the second condition)");
  add_config(two, false);
  two->add_option("--primary", o.primary_csv, "spectrum CSV of the problem");
  two->add_option("--secondary-spectrum", o.secondary_csv, "spectrum CSV with y(0)=0");
  two->add_option("--truncation,-N", o.truncation)->check(CLI::PositiveNumber);
  two->add_option("--lambda,-l", o.lambdas, "RE or RE,IM (repeatable)");
  two->add_option("--grid", o.grid, "re_lo,re_hi,n_re,im_lo,im_hi,n_im");

  auto* fitc = app.add_subcommand("fit", "least-squares inverse fit");
  add_config(fitc);
  fitc->add_option("--spec,-s", o.fit_spec, "fit spec JSON")->required();
  fitc->add_option("--truth", o.truth, "problem JSON with the true parameters");

  auto* contour = app.add_subcommand("contour-count", "zeros of Delta inside a rectangle");
  add_config(contour);
  contour->add_option("--rect", o.rect, "re_lo,re_hi,im_lo,im_hi")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: ArgumentError: " << e.what() << "\n" << "hint: run with --help for usage\n";
    return 1;
  }

  try {
    check_threads_env();
    if (eigs->parsed()) return cmd_eigs(o, out);
    if (sdata->parsed()) return cmd_spectral_data(o, out);
    if (weyl->parsed()) return cmd_weyl(o, out);
    if (asym->parsed()) return cmd_asym_check(o, out);
    if (gauge->parsed()) return cmd_gauge(o, out);
    if (two->parsed()) return cmd_two_spectra(o, out);
    if (fitc->parsed()) return cmd_fit(o, out, err);
    if (contour->parsed()) return cmd_contour_count(o, out);
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    if (!e.hint().empty()) err << "hint: " << e.hint() << "\n";
    return e.is_validation() ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: InternalError: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace jumpsl::cli
