#include <cmath>
#include <random>

#include "desk_problems.hpp"
#include "doctest.h"
#include "jumpsl/errors.hpp"
#include "jumpsl/propagator.hpp"
#include "oracles.hpp"

using namespace jumpsl;

namespace {

double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST_CASE("spectral point uses the principal branch") {
  for (cplx lambda : {cplx(4.0, 0.0), cplx(-9.0, 0.0), cplx(2.0, 3.0), cplx(-1.0, -1e-300), cplx(0.0, 0.0)}) {
    const auto sp = SpectralPoint::from_lambda(lambda);
    CHECK(std::abs(sp.rho * sp.rho - lambda) <= 1e-14 * std::max(1.0, std::abs(lambda)));
    CHECK(sp.rho.real() >= 0.0);
    CHECK(sp.tau == sp.rho.imag());
  }
  const auto neg = SpectralPoint::from_lambda(-9.0);
  CHECK(neg.rho.real() == 0.0);
  CHECK(neg.rho.imag() == doctest::Approx(3.0));
}

TEST_CASE("propagate_interval closed forms") {
  const auto p = desk::free_problem();
  auto s = propagate_interval(p, SpectralPoint::from_lambda(1.0), {1.0, 0.0, 0.0}, kPi / 2);
  CHECK(std::abs(s.y - 0.0) < 1e-10);
  CHECK(std::abs(s.yp + 1.0) < 1e-10);
  CHECK(s.x == kPi / 2);

  s = propagate_interval(p, SpectralPoint::from_lambda(0.0), {1.0, 0.0, 0.0}, 2.5);
  CHECK(std::abs(s.y - 1.0) < 1e-14);
  CHECK(std::abs(s.yp) < 1e-14);

  s = propagate_interval(p, SpectralPoint::from_lambda(-1.0), {1.0, 0.0, 0.0}, 1.0);
  CHECK(std::abs(s.y - std::cosh(1.0)) < 1e-10);
  CHECK(std::abs(s.yp - std::sinh(1.0)) < 1e-10);

  // Backward direction returns to the start.
  const auto back = propagate_interval(p, SpectralPoint::from_lambda(-1.0), s, 0.0);
  CHECK(std::abs(back.y - 1.0) < 1e-12);
  CHECK(std::abs(back.yp) < 1e-12);
}

TEST_CASE("propagate_interval rejects intervals across a jump") {
  const auto p = desk::one_jump();
  const auto sp = SpectralPoint::from_lambda(2.0);
  CHECK_THROWS_AS(propagate_interval(p, sp, {1.0, 0.0, 0.0}, 2.0), DomainError);
  CHECK_THROWS_AS(propagate_interval(p, sp, {1.0, 0.0, 0.0}, 4.0), DomainError);
  // Ending exactly on the jump is allowed.
  CHECK_NOTHROW(propagate_interval(p, sp, {1.0, 0.0, 0.0}, kPi / 3));
}

TEST_CASE("propagate_interval agrees with the series oracle on a polynomial cell") {
  const auto p = desk::two_jumps();
  const auto& cell = p.cells()[1];
  for (cplx lambda : {cplx(3.0, 0.0), cplx(-4.0, 1.5), cplx(40.0, 2.0)}) {
    const auto got = propagate_interval(p, SpectralPoint::from_lambda(lambda), {0.7, -0.2, cell.start}, cell.end);
    const auto want = oracle::integrate_cell(cell, cell.start, cell.end, lambda, {0.7L, -0.2L});
    const double scale = std::abs(want.y) * std::max(1.0, std::abs(std::sqrt(lambda))) + std::abs(want.yp);
    CHECK(std::abs(got.y - cplx(want.y)) < 1e-10 * scale);
    CHECK(std::abs(got.yp - cplx(want.yp)) < 1e-10 * scale);
  }
}

TEST_CASE("apply_jump examples") {
  const auto s = apply_jump({1.0, 2.0, 3.0, 5.0}, {1.0, 0.0, 1.0});
  CHECK(s.y == cplx(2.0));
  CHECK(s.yp == cplx(5.0));
  const auto id = apply_jump({1.0, 1.0, 1.0, 0.0}, {cplx(0.3, 1.0), cplx(-2.0, 0.5), 1.0});
  CHECK(id.y == cplx(0.3, 1.0));
  CHECK(id.yp == cplx(-2.0, 0.5));
  const auto t = apply_jump({1.0, -0.7, -3.0, 11.0}, {0.0, 1.0, 1.0});
  CHECK(t.y == cplx(0.0));
  CHECK(t.yp == cplx(-3.0));
  const auto back = apply_jump_inverse({1.0, 2.0, 3.0, 5.0}, s);
  CHECK(std::abs(back.y - 1.0) < 1e-15);
  CHECK(std::abs(back.yp) < 1e-15);
}

TEST_CASE("free problem fundamental solutions match closed forms") {
  const auto p = desk::free_problem();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.0, kPi), ur(-30.0, 30.0), ui(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double x = ux(rng);
    const cplx lambda(ur(rng), ui(rng));
    const auto sp = SpectralPoint::from_lambda(lambda);
    const cplx rho = sp.rho;
    const double growth = std::exp(std::abs(sp.tau) * kPi);
    const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp).at(x);
    const auto psi = fundamental_solution(p, SolutionKind::kPsi, sp).at(x);
    const auto chi = fundamental_solution(p, SolutionKind::kChi, sp).at(x);
    CHECK(std::abs(phi.y - std::cos(rho * x)) < 1e-10 * growth);
    CHECK(std::abs(psi.y - std::cos(rho * (kPi - x))) < 1e-10 * growth);
    CHECK(std::abs(chi.y - std::sin(rho * x) / rho) < 1e-10 * growth);
  }
  const auto chi0 = fundamental_solution(p, SolutionKind::kChi, SpectralPoint::from_lambda(0.0));
  for (double x : {0.0, 0.5, 1.7, kPi}) CHECK(std::abs(chi0.at(x).y - x) < 1e-13);
}

TEST_CASE("fundamental solutions match the series oracle across jumps") {
  for (const auto& p : {desk::one_jump(), desk::two_jumps(), desk::four_jumps()}) {
    const auto& r = p.robin();
    for (cplx lambda : {cplx(2.5, 0.0), cplx(-3.0, 2.0), cplx(25.0, -1.0)}) {
      const auto sp = SpectralPoint::from_lambda(lambda);
      const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp);
      const auto psi = fundamental_solution(p, SolutionKind::kPsi, sp);
      for (double x : {0.3, 1.1, 1.9, 2.9, kPi}) {
        const auto want = oracle::shoot_forward(p, lambda, {1.0L, -r.h}, x);
        CHECK(rel_err(phi.at(x, Side::kLeft).y, cplx(want.y)) < 1e-10);
        CHECK(rel_err(phi.at(x, Side::kLeft).yp, cplx(want.yp)) < 1e-10 * std::max(1.0, std::abs(sp.rho)));
      }
      for (double x : {0.0, 0.4, 1.5, 2.5}) {
        const auto want = oracle::shoot_backward(p, lambda, {1.0L, -r.H}, x);
        CHECK(rel_err(psi.at(x).y, cplx(want.y)) < 1e-10);
      }
    }
  }
}

TEST_CASE("every solution satisfies the transmission conditions") {
  for (const auto& p : {desk::two_jumps(), desk::four_jumps(), desk::eigen_jump()}) {
    const auto sp = SpectralPoint::from_lambda(cplx(7.3, 0.8));
    for (auto kind : {SolutionKind::kPhi, SolutionKind::kPsi, SolutionKind::kChi}) {
      const auto sol = fundamental_solution(p, kind, sp);
      for (const auto& j : p.jumps()) {
        const auto left = sol.at(j.d, Side::kLeft);
        const auto right = sol.at(j.d, Side::kRight);
        const double scale = std::abs(right.y) + std::abs(right.yp) + 1e-300;
        CHECK(std::abs(right.y - j.a * left.y) <= 1e-10 * scale);
        CHECK(std::abs(right.yp - j.b * left.yp - j.c * left.y) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("modified Wronskian") {
  const auto free = desk::free_problem();
  const auto sp = SpectralPoint::from_lambda(cplx(3.0, 1.0));
  const auto phi = fundamental_solution(free, SolutionKind::kPhi, sp);
  const auto chi = fundamental_solution(free, SolutionKind::kChi, sp);
  for (double x : {0.0, 0.8, 2.0, kPi}) {
    CHECK(std::abs(modified_wronskian(free, phi, chi, x) - 1.0) < 1e-12);
    CHECK(std::abs(modified_wronskian(free, phi, phi, x)) < 1e-14);
  }

  const auto p = desk::two_jumps();
  const auto phi2 = fundamental_solution(p, SolutionKind::kPhi, sp);
  const auto psi2 = fundamental_solution(p, SolutionKind::kPsi, sp);
  for (const auto& j : p.jumps()) {
    const cplx wl = modified_wronskian(p, phi2, psi2, j.d, Side::kLeft);
    const cplx wr = modified_wronskian(p, phi2, psi2, j.d, Side::kRight);
    CHECK(std::abs(wl - wr) < 1e-9 * std::max(1.0, std::abs(wl)));
  }

  const auto other = fundamental_solution(p, SolutionKind::kPsi, SpectralPoint::from_lambda(2.0));
  CHECK_THROWS_AS(modified_wronskian(p, phi2, other, 1.0), MismatchError);
}

TEST_CASE("conjugation symmetry") {
  const auto p = desk::four_jumps();
  const cplx lambda(5.5, 2.25);
  const auto a = fundamental_solution(p, SolutionKind::kPhi, SpectralPoint::from_lambda(lambda));
  const auto b = fundamental_solution(p, SolutionKind::kPhi, SpectralPoint::from_lambda(std::conj(lambda)));
  for (double x : {0.2, 1.0, 1.7, 2.4, 3.1}) {
    CHECK(std::abs(a.at(x).y - std::conj(b.at(x).y)) < 1e-10 * std::max(1.0, std::abs(a.at(x).y)));
    CHECK(std::abs(a.at(x).yp - std::conj(b.at(x).yp)) < 1e-10 * std::max(1.0, std::abs(a.at(x).yp)));
  }
}

TEST_CASE("forward then backward propagation returns the initial data") {
  for (const auto& p : {desk::one_jump(), desk::four_jumps()}) {
    for (cplx lambda : {cplx(12.0, 0.0), cplx(-6.0, 3.0)}) {
      const auto sp = SpectralPoint::from_lambda(lambda);
      const auto start = initial_data(p, SolutionKind::kPhi, lambda);
      const auto end = shoot_to_end(p, sp, start);
      const auto back = shoot_to_end(p, sp, {end.value, 0.0, 0.0});
      CHECK(std::abs(back.value.y - start.value.y) < 1e-8);
      CHECK(std::abs(back.value.yp - start.value.yp) < 1e-8);
    }
  }
}

TEST_CASE("variational derivative matches central differences") {
  const auto p = desk::two_jumps();
  PropagationOptions opt;
  opt.variational = true;
  for (cplx lambda : {cplx(3.7, 0.0), cplx(-2.0, 1.0), cplx(60.0, 0.5)}) {
    const auto sp = SpectralPoint::from_lambda(lambda);
    const auto start = initial_data(p, SolutionKind::kPhi, lambda);
    const auto got = shoot_to_end(p, sp, start, opt);
    const double step = 1e-5 * std::max(1.0, std::abs(lambda));
    const auto plus = shoot_to_end(p, SpectralPoint::from_lambda(lambda + step), start);
    const auto minus = shoot_to_end(p, SpectralPoint::from_lambda(lambda - step), start);
    const cplx fd = (plus.value.y - minus.value.y) / (2.0 * step);
    CHECK(std::abs(got.dy - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("large rho stays accurate without step collapse") {
  const auto p = desk::free_problem();
  const auto sp = SpectralPoint::from_rho(160.25);
  const auto phi = fundamental_solution(p, SolutionKind::kPhi, sp);
  for (double x : {0.1, 1.0, 2.0, 3.0}) CHECK(std::abs(phi.at(x).y - std::cos(160.25 * x)) < 1e-10);
  const auto q = desk::three_jumps();
  const auto sq = SpectralPoint::from_rho(cplx(160.0, 0.0));
  const auto a = shoot_to_end(q, sq, initial_data(q, SolutionKind::kPhi, sq.lambda));
  CHECK(std::isfinite(std::abs(a.value.y)));
}
