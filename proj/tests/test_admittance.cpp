#include <cmath>
#include <vector>

#include "doctest.h"
#include "shg/admittance.hpp"
#include "shg/cgo.hpp"

using namespace shg;

namespace {

MaterialModel medium(int n, double chi_amp) {
  BoxGrid g = BoxGrid::cube(n, 1.0);
  MaterialModel m = MaterialModel::vacuum(g);
  m.eps = sample_scalar(g, [](const Vec3& x) { return cplx(1.0 + 0.3 * std::exp(-x.squaredNorm() / 0.05)); });
  m.chi2 = sample_field(g, [&](const Vec3& x) {
    double r2 = x.squaredNorm();
    double b = r2 < 0.1 ? chi_amp * std::exp(-r2 / 0.02) * std::exp(1 - 1 / (1 - r2 / 0.1)) : 0.0;
    return CVec3(b, cplx(0, 0.5) * b, -0.25 * b);
  });
  return m;
}

TangentialTrace wave(const BoxGrid& g, double k, const Vec3& dir, const CVec3& p) {
  return tangential_trace(plane_wave(g, kI * k * dir.normalized().cast<cplx>(), p));
}

TracePair probe(const BoxGrid& g, double omega) {
  return {wave(g, omega, Vec3(0, 0, 1), CVec3(1, 0.3, 0)), wave(g, 2 * omega, Vec3(1, 1, 0), CVec3(0, 0, 1))};
}

double rel(const TracePair& a, const TracePair& b) { return trace_pair_l2(a - b) / trace_pair_l2(b); }

}  // namespace

TEST_CASE("without chi2 the nonlinear map is the linear map") {
  MaterialModel m = medium(10, 0.0);
  AdmittanceMap am(m, 1.0);
  TracePair f = probe(m.grid, 1.0);
  auto nl = am.nonlinear(f), li = am.linear(f);
  CHECK(rel(nl.output, li.output) < 1e-12);
  auto so = am.second_order(f);
  CHECK(trace_pair_l2(so.tH) == 0);
  TracePair z{TangentialTrace(m.grid), TangentialTrace(m.grid)};
  CHECK(trace_pair_l2(am.linear(z).output) == 0);
}

TEST_CASE("zero input gives zero output") {
  MaterialModel m = medium(10, 1.0);
  AdmittanceMap am(m, 1.0);
  TracePair z{TangentialTrace(m.grid), TangentialTrace(m.grid)};
  CHECK(trace_pair_l2(am.nonlinear(z).output) == 0);
  CHECK(trace_pair_l2(am.second_order(z).tH) == 0);
}

TEST_CASE("linear map is linear and decoupled") {
  MaterialModel m = medium(10, 1.0);
  AdmittanceMap am(m, 1.0);
  TracePair f = probe(m.grid, 1.0);
  TracePair h{wave(m.grid, 1.0, Vec3(1, 0, 1), CVec3(0, 1, 0)), wave(m.grid, 2.0, Vec3(0, 1, 0), CVec3(1, 0, 0.5))};
  cplx a(0.4, -1.2), b(2.0, 0.3);
  TracePair comb{a * f.omega + b * h.omega, a * f.two_omega + b * h.two_omega};
  auto lf = am.linear(f).output, lh = am.linear(h).output, lc = am.linear(comb).output;
  TracePair expect{a * lf.omega + b * lh.omega, a * lf.two_omega + b * lh.two_omega};
  CHECK(rel(lc, expect) < 1e-8);
  // the omega output ignores the 2 omega input
  TracePair g{f.omega, h.two_omega};
  auto lg = am.linear(g).output;
  CHECK((lg.omega - lf.omega).l2() <= 1e-12 * lf.omega.l2());
  CHECK((lg.two_omega - lh.two_omega).l2() <= 1e-12 * lh.two_omega.l2());
}

TEST_CASE("second order traces are quadratic in the input") {
  MaterialModel m = medium(10, 1.0);
  AdmittanceMap am(m, 1.0);
  TracePair f = probe(m.grid, 1.0);
  auto t1 = am.second_order(f).tH;
  auto t2 = am.second_order(cplx(0.5) * f).tH;
  CHECK(rel(cplx(4.0) * t2, t1) < 1e-8);
  // a phase on the omega input rotates the 2 omega channel twice
  cplx ph = std::exp(kI * 0.7);
  TracePair fp{ph * f.omega, ph * ph * f.two_omega};
  auto t3 = am.second_order(fp).tH;
  CHECK((t3.two_omega - ph * ph * t1.two_omega).l2() <= 1e-8 * t1.two_omega.l2());
  CHECK((t3.omega - ph * t1.omega).l2() <= 1e-8 * t1.omega.l2());
  CHECK(trace_pair_l2(t1) > 0);
}

TEST_CASE("s-extraction recovers the second order traces") {
  MaterialModel m = medium(12, 1.0);
  AdmittanceMap am(m, 1.0);
  TracePair f = probe(m.grid, 1.0);
  AdmittanceFn nl = [&](const TracePair& x) { return am.nonlinear(x).output; };
  AdmittanceFn li = [&](const TracePair& x) { return am.linear(x).output; };
  auto oracle = am.second_order(f).tH;
  ExtractedTrace ex = extract_second_order_trace(nl, li, f);
  MESSAGE("extraction error " << rel(ex.trace, oracle) << " estimate " << ex.error_estimate);
  CHECK(rel(ex.trace, oracle) < 0.05);

  // raw quotients approach the oracle at rate s
  std::vector<double> ss{2e-2, 1e-2, 5e-3}, errs;
  TracePair lin = li(f);
  for (double s : ss) {
    TracePair q = cplx(1 / (s * s)) * (nl(cplx(s) * f) - cplx(s) * lin);
    errs.push_back(rel(q, oracle));
  }
  double slope = std::log(errs.front() / errs.back()) / std::log(ss.front() / ss.back());
  MESSAGE("quotient rate " << slope);
  CHECK(slope > 0.7);
  CHECK_THROWS_AS(extract_second_order_trace(nl, li, f, {1e-2}), Error);
}

TEST_CASE("boundary pairing is sesquilinear") {
  BoxGrid g = BoxGrid::cube(8, 1.0);
  auto a = wave(g, 1.0, Vec3(0, 1, 1), CVec3(1, 0, 0));
  auto b = wave(g, 1.5, Vec3(1, 0, 0), CVec3(0, 1, cplx(0, 1)));
  cplx c(0.3, 2.0);
  cplx p = boundary_pairing(a, b);
  CHECK(std::abs(boundary_pairing(c * a, b) - c * p) < 1e-12 * std::abs(p));
  CHECK(std::abs(boundary_pairing(a, c * b) - std::conj(c) * p) < 1e-12 * std::abs(p));
  CHECK(boundary_pairing(a, TangentialTrace(g)) == cplx(0));
  CHECK_THROWS_AS(boundary_pairing(a, TangentialTrace(BoxGrid::cube(9, 1.0))), Error);
}

TEST_CASE("boundary and volume pairings agree as the grid is refined") {
  std::vector<double> diffs;
  for (int n : {10, 14, 18}) {
    MaterialModel m = medium(n, 1.0);
    AdmittanceMap am(m, 1.0);
    TracePair f = probe(m.grid, 1.0);
    TracePair ft{wave(m.grid, 1.0, Vec3(1, 0, 0), CVec3(0, 0, 1)), wave(m.grid, 2.0, Vec3(0, 1, 0), CVec3(1, 0, 0))};
    auto so = am.second_order(f);
    ShgSolver conj(m.conjugate(), 1.0);
    auto t1 = conj.system(1).solve_bvp(ft.omega), t2 = conj.system(2).solve_bvp(ft.two_omega);
    cplx B = boundary_pairing(so.tH, ft);
    cplx V = volume_pairing(m.chi2, so.E1_omega, so.E1_2omega, t1.E, t2.E, 1.0);
    diffs.push_back(std::abs(B - V) / std::abs(V));
  }
  MESSAGE("pairing differences " << diffs[0] << " " << diffs[1] << " " << diffs[2]);
  CHECK(diffs[2] < 0.05);
  CHECK(diffs[1] < diffs[0]);
  CHECK(diffs[2] < diffs[1]);
}
