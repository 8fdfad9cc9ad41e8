#include <cmath>

#include "doctest.h"
#include "shg/cgo.hpp"
#include "shg/nonlinear.hpp"

using namespace shg;

namespace {

MaterialModel chi_bump(int n, double amp) {
  BoxGrid g = BoxGrid::cube(n, 1.0);
  MaterialModel m = MaterialModel::vacuum(g);
  m.eps = sample_scalar(g, [](const Vec3& x) { return cplx(1.0 + 0.2 * std::exp(-x.squaredNorm() / 0.05)); });
  m.chi2 = sample_field(g, [&](const Vec3& x) {
    double r2 = x.squaredNorm();
    double b = r2 < 0.09 ? amp * std::pow(1 - r2 / 0.09, 4) : 0.0;
    return CVec3(b, cplx(0, 0.5) * b, -0.25 * b);
  });
  return m;
}

TangentialTrace wave(const BoxGrid& g, double k, const Vec3& dir, const CVec3& p) {
  return tangential_trace(plane_wave(g, kI * k * dir.cast<cplx>(), p));
}

ShgState state_from(const LinearSolution& a, const LinearSolution& b) {
  ShgState s;
  s.yee_omega = a.yee;
  s.yee_2omega = b.yee;
  s.e_omega = a.E;
  s.h_omega = a.H;
  s.e_2omega = b.E;
  s.h_2omega = b.H;
  return s;
}

double state_diff(const ShgState& a, const ShgState& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.yee_omega.e.size(); ++i) s += std::norm(a.yee_omega.e[i] - b.yee_omega.e[i]);
  for (std::size_t i = 0; i < a.yee_omega.h.size(); ++i) s += std::norm(a.yee_omega.h[i] - b.yee_omega.h[i]);
  for (std::size_t i = 0; i < a.yee_2omega.e.size(); ++i) s += std::norm(a.yee_2omega.e[i] - b.yee_2omega.e[i]);
  for (std::size_t i = 0; i < a.yee_2omega.h.size(); ++i) s += std::norm(a.yee_2omega.h[i] - b.yee_2omega.h[i]);
  return std::sqrt(s);
}

// zero-trace state driven by a smooth random-looking source
ShgState trial_state(const ShgSolver& s, double scale, double phase) {
  const BoxGrid& g = s.material().grid;
  auto J = sample_field(g, [&](const Vec3& x) {
    double b = std::exp(-8 * x.squaredNorm());
    return CVec3(scale * b * std::exp(kI * (phase + x(0))), scale * b * x(1), 0);
  });
  return state_from(s.system(1).solve_sources(J, nullptr), s.system(2).solve_sources(J, nullptr));
}

}  // namespace

TEST_CASE("operator A without chi2 returns the zero state") {
  MaterialModel m = chi_bump(10, 0.0);
  ShgSolver s(m, 1.0);
  auto fw = wave(m.grid, 1.0, Vec3(0, 0, 1), CVec3(1, 0, 0));
  auto b1 = s.system(1).solve_bvp(fw), b2 = s.system(2).solve_bvp(TangentialTrace(m.grid));
  ShgState x = trial_state(s, 1.0, 0.3);
  ShgState a = s.apply_A(x, b1.yee, b2.yee);
  CHECK(a.norm() == 0);
  // the solve returns the linear solution in one iteration
  ShgSolution sol = s.solve(fw, TangentialTrace(m.grid));
  CHECK(sol.report.iterations == 1);
  CHECK((sol.E_omega - b1.E).max_abs() == 0);
  CHECK(sol.E_2omega.max_abs() == 0);
}

TEST_CASE("operator A matches an independently assembled source") {
  MaterialModel m = chi_bump(10, 0.8);
  ShgSolver s(m, 1.2);
  const BoxGrid& g = m.grid;
  auto fw = wave(g, 1.2, Vec3(0, 0, 1), CVec3(1, 0.5, 0));
  auto f2 = wave(g, 2.4, Vec3(1, 0, 0), CVec3(0, 1, 0));
  auto b1 = s.system(1).solve_bvp(fw), b2 = s.system(2).solve_bvp(f2);
  YeeGrid y(g);
  ShgState a = s.apply_A(ShgState::zero(y), b1.yee, b2.yee);
  // polarization currents built by hand at the nodes
  ComplexVectorField E1 = y.edges_to_nodes(b1.yee.e), E2 = y.edges_to_nodes(b2.yee.e);
  ComplexVectorField Jw(g), J2w(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx p = std::conj(E1[i](0)) * E2[i](0) + std::conj(E1[i](1)) * E2[i](1) + std::conj(E1[i](2)) * E2[i](2);
    cplx q = E1[i](0) * E1[i](0) + E1[i](1) * E1[i](1) + E1[i](2) * E1[i](2);
    Jw[i] = -kI * 1.2 * p * m.chi2[i];
    J2w[i] = -2.0 * kI * 1.2 * q * m.chi2[i];
  }
  auto r1 = s.system(1).solve_sources(Jw, nullptr), r2 = s.system(2).solve_sources(J2w, nullptr);
  CHECK((a.e_omega - r1.E).max_abs() <= 1e-8 * r1.E.max_abs());
  CHECK((a.e_2omega - r2.E).max_abs() <= 1e-8 * r2.E.max_abs());
  // the corrections have zero tangential traces
  CHECK(tangential_trace(a.e_omega).max_abs() == 0);
  CHECK(tangential_trace(a.e_2omega).max_abs() == 0);

  // sign structure of the sources
  auto src = shg_sources(E1, E2, m.chi2, 1.2);
  auto neg = shg_sources(-1.0 * E1, E2, m.chi2, 1.2);
  auto both = shg_sources(-1.0 * E1, -1.0 * E2, m.chi2, 1.2);
  CHECK((neg.second - src.second).max_abs() == 0);
  CHECK((both.first - src.first).max_abs() == 0);
  CHECK((neg.first + src.first).max_abs() == 0);
}

TEST_CASE("Picard iteration converges to a discrete solution") {
  MaterialModel m = chi_bump(12, 1.0);
  const BoxGrid& g = m.grid;
  ShgSolver s(m, 1.0);
  auto fw = wave(g, 1.0, Vec3(0, 0, 1), CVec3(1, 0, 0));
  ShgSolveOptions o;
  ShgSolution sol = s.solve(fw, TangentialTrace(g), o);
  CHECK(sol.report.iterations > 1);
  CHECK(sol.report.max_contraction < 1);
  for (double r : sol.report.residuals) CHECK(r < 1e-8);
  // independent residual of the returned fields
  auto r = shg_residual(sol.yee_omega, sol.yee_2omega, m, 1.0);
  for (int c = 0; c < 4; ++c) CHECK(r[c] < 1e-8);
  CHECK(sol.E_2omega.l2() > 0);
  CHECK(sol.report.solution_bound > 0);

  // uniqueness: iterate A from a different start
  auto b1 = s.system(1).solve_bvp(fw), b2 = s.system(2).solve_bvp(TangentialTrace(g));
  ShgState x = trial_state(s, 0.5, 1.0);
  for (int it = 0; it < 60; ++it) x = s.apply_A(x, b1.yee, b2.yee);
  ShgState fixed = state_from(s.system(1).solve_sources(ComplexVectorField(g), nullptr),
                              s.system(2).solve_sources(ComplexVectorField(g), nullptr));
  // fixed point corrections are the solution minus the linear base
  for (std::size_t i = 0; i < fixed.yee_omega.e.size(); ++i) {
    fixed.yee_omega.e[i] = sol.yee_omega.e[i] - b1.yee.e[i];
    fixed.yee_2omega.e[i] = sol.yee_2omega.e[i] - b2.yee.e[i];
  }
  for (std::size_t i = 0; i < fixed.yee_omega.h.size(); ++i) {
    fixed.yee_omega.h[i] = sol.yee_omega.h[i] - b1.yee.h[i];
    fixed.yee_2omega.h[i] = sol.yee_2omega.h[i] - b2.yee.h[i];
  }
  CHECK(state_diff(x, fixed) <= 1e-7 * fixed.norm());
}

TEST_CASE("operator A is a contraction on a small ball") {
  MaterialModel m = chi_bump(10, 1.0);
  ShgSolver s(m, 1.0);
  const BoxGrid& g = m.grid;
  auto fw = 0.5 * wave(g, 1.0, Vec3(0, 1, 0), CVec3(0, 0, 1));
  auto b1 = s.system(1).solve_bvp(fw), b2 = s.system(2).solve_bvp(TangentialTrace(g));
  double worst = 0;
  for (int k = 0; k < 6; ++k) {
    ShgState x1 = trial_state(s, 0.1, 0.7 * k), x2 = trial_state(s, 0.05 * (k + 1), -0.3 * k);
    double d = state_diff(x1, x2);
    double da = state_diff(s.apply_A(x1, b1.yee, b2.yee), s.apply_A(x2, b1.yee, b2.yee));
    worst = std::max(worst, da / d);
  }
  MESSAGE("measured Lipschitz constant " << worst);
  CHECK(worst < 1);
}

TEST_CASE("second harmonic scales quadratically") {
  MaterialModel m = chi_bump(12, 1.0);
  ShgSolver s(m, 1.0);
  auto fw = wave(m.grid, 1.0, Vec3(0, 0, 1), CVec3(1, 0, 0));
  double prev = 0;
  for (double sc : {1e-2, 5e-3, 2.5e-3}) {
    ShgSolution sol = s.solve(sc * fw, TangentialTrace(m.grid));
    double n = sol.E_2omega.l2();
    if (prev > 0) CHECK(prev / n == doctest::Approx(4.0).epsilon(0.1));
    prev = n;
  }
}

TEST_CASE("solver guards") {
  MaterialModel m = chi_bump(10, 1.0);
  ShgSolver s(m, 1.0);
  auto fw = wave(m.grid, 1.0, Vec3(0, 0, 1), CVec3(1, 0, 0));
  ShgSolveOptions o;
  o.epsilon_ball = 1e-3;
  try {
    s.solve(fw, TangentialTrace(m.grid), o);
    FAIL("expected SmallnessViolated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SmallnessViolated);
  }
  o = ShgSolveOptions{};
  o.epsilon_ball = 1e300;
  try {
    s.solve(1e3 * fw, TangentialTrace(m.grid), o);
    FAIL("expected ContractionFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ContractionFailed);
  }
  o = ShgSolveOptions{};
  o.max_iter = 1;
  try {
    s.solve(fw, TangentialTrace(m.grid), o);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoConvergence);
  }
  YeeGrid y(m.grid);
  ShgState z = ShgState::zero(y);
  auto r = shg_residual(z.yee_omega, z.yee_2omega, m, 1.0);
  for (double v : r) CHECK(v == 0);
}
