#include <cmath>
#include <random>

#include "desk_problems.hpp"
#include "doctest.h"
#include "jumpsl/errors.hpp"
#include "jumpsl/spectrum.hpp"
#include "oracles.hpp"

using namespace jumpsl;

namespace {

double rel(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

std::vector<ValidatedProblem> robin_desk() {
  return {desk::one_jump(), desk::two_jumps(), desk::three_jumps(), desk::four_jumps()};
}

}  // namespace

TEST_CASE("char_delta closed forms") {
  const auto free = desk::free_problem();
  for (cplx lambda : {cplx(0.25), cplx(2.0), cplx(-1.0)}) {
    const cplx rho = SpectralPoint::from_lambda(lambda).rho;
    CHECK(rel(char_delta(free, lambda), rho * std::sin(rho * kPi)) < 1e-10);
  }
  const auto half = desk::half_jump();
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> re(-30.0, 300.0), im(-20.0, 20.0);
  for (int i = 0; i < 20; ++i) {
    const cplx lambda(re(gen), i % 2 ? im(gen) : 0.0);
    const cplx rho = SpectralPoint::from_lambda(lambda).rho;
    CHECK(rel(char_delta(half, lambda), 1.25 * rho * std::sin(rho * kPi)) < 1e-8);
  }
}

TEST_CASE("the three forms of Delta agree") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> re(-20.0, 400.0), im(-30.0, 30.0);
  auto problems = robin_desk();
  problems.push_back(desk::eigen_jump());
  for (const auto& p : problems) {
    for (int i = 0; i < 20; ++i) {
      const auto check = char_delta_cross_check(p, cplx(re(gen), im(gen)), 0.5 + 0.1 * i);
      CHECK(check.discrepancy < 1e-9);
    }
  }
}

TEST_CASE("char_delta agrees with the series oracle") {
  for (const auto& p : robin_desk()) {
    for (cplx lambda : {cplx(-3.0, 0.0), cplx(7.5, 0.0), cplx(30.0, 4.0)}) {
      const auto want = oracle::robin_delta(p, lambda);
      CHECK(rel(char_delta(p, lambda), cplx(want)) < 1e-11);
    }
  }
}

TEST_CASE("char_delta_derivative") {
  const auto free = desk::free_problem();
  for (int n = 1; n <= 8; ++n) {
    const double want = kPi / 2 * (n % 2 ? -1.0 : 1.0);
    CHECK(std::abs(char_delta_derivative(free, n * n) - want) < 1e-10);
  }
  auto problems = robin_desk();
  problems.push_back(desk::eigen_jump());
  for (const auto& p : problems) {
    for (cplx lambda : {cplx(3.7), cplx(-2.0, 1.0), cplx(55.0, -3.0)}) {
      const double h = 1e-5 * std::max(1.0, std::abs(lambda));
      const cplx fd = (char_delta(p, lambda + h) - char_delta(p, lambda - h)) / (2 * h);
      CHECK(rel(char_delta_derivative(p, lambda), fd) < 1e-6);
    }
  }
}

TEST_CASE("free problem eigenvalues and spectral data") {
  const auto p = desk::free_problem();
  const auto sd = spectral_data(p, eigenvalues(p, 20));
  REQUIRE(sd.records.size() == 20);
  for (const auto& r : sd.records) {
    CHECK(std::abs(r.lambda - r.n * r.n) < 1e-8);
    CHECK(std::abs(r.gamma - (r.n == 0 ? 1 / kPi : 2 / kPi)) < 1e-8);
    CHECK(r.beta == doctest::Approx(r.n % 2 ? -1.0 : 1.0).epsilon(1e-8));
    CHECK(r.certification == Certification::kContourVerified);
  }
  const auto half = eigenvalues(desk::half_jump(), 20);
  for (const auto& r : half.records) CHECK(std::abs(r.lambda - r.n * r.n) < 1e-8);
}

TEST_CASE("eigenvalues match a brute-force oracle scan") {
  const auto p = desk::one_jump();
  const auto sd = eigenvalues(p, 12);
  auto delta = [&](double lambda) { return static_cast<double>(oracle::robin_delta(p, lambda).real()); };
  const auto brute = oracle::brute_force_eigenvalues(delta, -3.0, 13.0, 1e-3, 12);
  REQUIRE(brute.size() == 12);
  for (int n = 0; n < 12; ++n) CHECK(std::abs(sd.records[n].lambda - brute[n]) < 1e-8 * std::max(1.0, brute[n]));
}

TEST_CASE("eigenvalue invariants on desk problems") {
  auto problems = robin_desk();
  problems.push_back(desk::eigen_desk());
  problems.push_back(desk::eigen_jump());
  for (const auto& p : problems) {
    const auto sd = eigenvalues(p, 25);
    for (std::size_t n = 0; n < sd.records.size(); ++n) {
      const auto& r = sd.records[n];
      CHECK(r.n == static_cast<int>(n));
      if (n > 0) CHECK(r.lambda > sd.records[n - 1].lambda);
      const double scale = std::max(1.0, std::abs(char_delta_derivative(p, r.lambda)) * std::max(1.0, std::abs(r.lambda)));
      CHECK(std::abs(char_delta(p, r.lambda)) < 1e-8 * scale);
      const double step = 1e-6 * std::max(1.0, std::abs(r.lambda));
      CHECK((char_delta(p, r.lambda - step).real() < 0) != (char_delta(p, r.lambda + step).real() < 0));
    }
  }
}

TEST_CASE("derivative identity with one global sign") {
  auto problems = robin_desk();
  problems.push_back(desk::free_problem());
  problems.push_back(desk::eigen_desk());
  problems.push_back(desk::eigen_jump());
  for (const auto& p : problems) {
    const auto sd = spectral_data(p, eigenvalues(p, 10));
    for (const auto& r : sd.records) {
      const double dd = char_delta_derivative(p, r.lambda).real();
      CHECK(std::abs(dd - r.beta / r.gamma) < 1e-6 * std::abs(dd));
    }
  }
}

TEST_CASE("eigenfunctions are proportional with factor beta") {
  const auto p = desk::three_jumps();
  const auto sd = spectral_data(p, eigenvalues(p, 6));
  for (const auto& r : sd.records) {
    const auto sp = SpectralPoint::from_lambda(r.lambda);
    const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp);
    const auto psi = fundamental_solution(p, SolutionKind::kPsi, sp);
    const double norm = std::sqrt(1.0 / r.gamma);
    for (int i = 0; i < 50; ++i) {
      const double x = kPi * i / 49.0;
      CHECK(std::abs(psi.at(x).y - r.beta * phi.at(x).y) < 1e-7 * norm);
    }
  }
}

TEST_CASE("gamma matches an independent quadrature") {
  const auto p = desk::two_jumps();
  const auto sd = spectral_data(p, eigenvalues(p, 5));
  for (const auto& r : sd.records) {
    double norm = 0.0;
    for (const auto& cell : p.cells()) {
      auto f = [&](double x) {
        const auto s = oracle::shoot_forward(p, r.lambda, {1.0L, -p.robin().h}, x);
        return static_cast<double>(std::norm(s.y));
      };
      norm += p.weights()[cell.segment] * oracle::composite_gauss(f, cell.start, cell.end, 6);
    }
    CHECK(std::abs(1.0 / norm - r.gamma) < 1e-8 * r.gamma);
  }
}

TEST_CASE("asymptotic density") {
  for (const auto& p : robin_desk()) {
    const auto sd = eigenvalues(p, 61);
    for (int n = 30; n <= 60; ++n) CHECK(std::abs(sd.records[n].rho.real() / n - 1.0) < 0.02);
  }
}

TEST_CASE("gauge transform preserves the spectrum") {
  for (const auto& p : robin_desk()) {
    const auto a = eigenvalues(p, 15);
    const auto b = eigenvalues(gauge_transform(p), 15);
    for (int n = 0; n < 15; ++n) CHECK(std::abs(a.records[n].lambda - b.records[n].lambda) < 1e-8);
  }
}

TEST_CASE("count_zeros_contour") {
  const auto p = desk::free_problem();
  CHECK(count_zeros_contour(p, {0.5, 1.5, -0.5, 0.5}) == 1);
  CHECK(count_zeros_contour(p, {1.5, 3.5, -1.0, 1.0}) == 0);
  CHECK(count_zeros_contour(p, {-5.0, 90.5, -1.0, 1.0}) == 10);
  CHECK(count_zeros_contour(p, {-5.0, 90.5, -0.5, 2.0}) == 10);
  CHECK_THROWS_AS(count_zeros_contour(p, {4.0, 10.0, -1.0, 1.0}), ContourTooCloseError);

  const auto q = desk::four_jumps();
  const auto sd = eigenvalues(q, 12);
  int below = 0;
  for (const auto& r : sd.records) below += r.lambda < 90.5;
  CHECK(count_zeros_contour(q, {scan_floor(q) - 5.0, 90.5, -1.0, 1.0}) == below);
}

TEST_CASE("a coarse scan that misses roots is reported") {
  EigenvalueOptions o;
  o.scan_step = 2.5;
  o.retries = 0;
  CHECK_THROWS_AS(eigenvalues(desk::free_problem(), 10, o), MissedEigenvalueError);
  o.retries = 3;
  CHECK_NOTHROW(eigenvalues(desk::free_problem(), 10, o));
}

TEST_CASE("secondary spectra") {
  const auto free = desk::free_problem();
  const auto mu = secondary_eigenvalues(free, INFINITY, 10);
  for (const auto& r : mu.records) CHECK(std::abs(r.lambda - (r.n + 0.5) * (r.n + 0.5)) < 1e-8);
  const auto same = secondary_eigenvalues(desk::one_jump(), 1.0, 8);
  const auto base = eigenvalues(desk::one_jump(), 8);
  for (int n = 0; n < 8; ++n) CHECK(std::abs(same.records[n].lambda - base.records[n].lambda) < 1e-9);
  CHECK_THROWS_AS(secondary_eigenvalues(desk::eigen_desk(), INFINITY, 3), VariantError);
}

TEST_CASE("spectrum CSV round trip") {
  const auto p = desk::one_jump();
  const auto sd = spectral_data(p, eigenvalues(p, 5));
  const auto text = to_csv(sd);
  CHECK(text.rfind("n,lambda,rho,gamma,beta,certification\n", 0) == 0);
  CHECK(text.find("i,") != std::string::npos);  // lambda_0 < 0
  const auto back = spectral_data_from_csv(text);
  REQUIRE(back.records.size() == 5);
  for (int n = 0; n < 5; ++n) {
    CHECK(back.records[n].lambda == sd.records[n].lambda);
    CHECK(back.records[n].gamma == sd.records[n].gamma);
  }
  const auto e = spectral_data(desk::eigen_desk(), eigenvalues(desk::eigen_desk(), 3));
  CHECK(to_csv(e).rfind("n,lambda,rho,gamma,beta,certification,variant\n", 0) == 0);
  CHECK(to_json(e)["variant"] == "eigenparameter");
  CHECK_THROWS_AS(spectral_data_from_csv("n,lambda\n0,abc\n"), ConfigParseError);
}
