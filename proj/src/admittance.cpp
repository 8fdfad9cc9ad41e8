#include "shg/admittance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace shg {

double trace_pair_l2(const TracePair& t) { return std::hypot(t.omega.l2(), t.two_omega.l2()); }

TracePair operator-(const TracePair& a, const TracePair& b) {
  return {a.omega - b.omega, a.two_omega - b.two_omega};
}

TracePair operator*(cplx s, const TracePair& a) { return {s * a.omega, s * a.two_omega}; }

AdmittanceMap::AdmittanceMap(const MaterialModel& m, double omega, const ShgSolveOptions& opts)
    : opts_(opts), solver_(m, omega, opts.linear) {}

AdmittanceSample AdmittanceMap::nonlinear(const TracePair& f) const {
  ShgSolution s = solver_.solve(f.omega, f.two_omega, opts_);
  auto J = solver_.edge_currents(s.yee_omega, s.yee_2omega);
  AdmittanceSample out;
  out.input = f;
  out.output.omega = magnetic_trace(solver_.system(1), s.yee_omega, &J.first);
  out.output.two_omega = magnetic_trace(solver_.system(2), s.yee_2omega, &J.second);
  out.report = s.report;
  return out;
}

AdmittanceSample AdmittanceMap::linear(const TracePair& f) const {
  AdmittanceSample out;
  out.input = f;
  for (int c = 0; c < 2; ++c) {
    const MaxwellSystem& sys = solver_.system(c + 1);
    LinearSolution s = sys.solve_bvp(c == 0 ? f.omega : f.two_omega);
    (c == 0 ? out.output.omega : out.output.two_omega) = magnetic_trace(sys, s.yee);
    out.linear[c] = s.report;
  }
  return out;
}

SecondOrderFields AdmittanceMap::second_order(const TracePair& f) const {
  const MaxwellSystem& s1 = solver_.system(1);
  const MaxwellSystem& s2 = solver_.system(2);
  LinearSolution b1 = s1.solve_bvp(f.omega);
  LinearSolution b2 = s2.solve_bvp(f.two_omega);
  auto J = solver_.edge_currents(b1.yee, b2.yee);
  const YeeGrid& y = *s1.yee();
  CVector zero(y.nedges(), 0.0);
  LinearSolution a = s1.solve_edges(zero, &J.first, nullptr);
  LinearSolution b = s2.solve_edges(zero, &J.second, nullptr);
  SecondOrderFields out;
  out.E1_omega = b1.E;
  out.E1_2omega = b2.E;
  out.tH.omega = magnetic_trace(s1, a.yee, &J.first);
  out.tH.two_omega = magnetic_trace(s2, b.yee, &J.second);
  out.E_omega = std::move(a.E);
  out.H_omega = std::move(a.H);
  out.E_2omega = std::move(b.E);
  out.H_2omega = std::move(b.H);
  out.yee_omega = std::move(a.yee);
  out.yee_2omega = std::move(b.yee);
  return out;
}

AdmittanceSample admittance_nonlinear(const MaterialModel& m, double omega, const TracePair& f,
                                      const ShgSolveOptions& opts) {
  return AdmittanceMap(m, omega, opts).nonlinear(f);
}

AdmittanceSample admittance_linear(const MaterialModel& m, double omega, const TracePair& f,
                                   const LinearSolverOptions& opts) {
  ShgSolveOptions o;
  o.linear = opts;
  return AdmittanceMap(m, omega, o).linear(f);
}

SecondOrderFields second_order_fields(const MaterialModel& m, double omega, const TracePair& f,
                                      const LinearSolverOptions& opts) {
  ShgSolveOptions o;
  o.linear = opts;
  return AdmittanceMap(m, omega, o).second_order(f);
}

ExtractedTrace extract_second_order_trace(const AdmittanceFn& nonlinear, const AdmittanceFn& linear,
                                          const TracePair& f, std::vector<double> s_list) {
  if (s_list.size() < 2) throw Error(Errc::InvalidConfig, "need at least two s values");
  std::sort(s_list.begin(), s_list.end(), std::greater<>());
  ExtractedTrace out;
  out.s_list = s_list;
  TracePair lin = linear(f);
  for (double s : s_list) {
    TracePair q = nonlinear(cplx(s) * f) - cplx(s) * lin;
    out.quotients.push_back(cplx(1.0 / (s * s)) * q);
  }
  std::size_t n = s_list.size();
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < n; ++i)
    diffs.push_back(trace_pair_l2(out.quotients[i] - out.quotients[i + 1]));
  if (n >= 3)
    for (std::size_t i = 0; i + 1 < diffs.size(); ++i)
      if (diffs[i + 1] > diffs[i])
        throw Error(Errc::ExtrapolationUnreliable, "s-sequence differences are not decreasing");
  auto rich = [&](std::size_t i) {
    double s1 = s_list[i], s2 = s_list[i + 1];
    return cplx(1.0 / (s1 - s2)) * (cplx(s1) * out.quotients[i + 1] - cplx(s2) * out.quotients[i]);
  };
  out.trace = rich(n - 2);
  double scale = std::max(trace_pair_l2(out.trace), 1e-300);
  if (n >= 3)
    out.error_estimate = trace_pair_l2(out.trace - rich(n - 3)) / scale;
  else
    out.error_estimate = trace_pair_l2(out.trace - out.quotients[n - 1]) / scale;
  return out;
}

cplx boundary_pairing(const TangentialTrace& tH, const TangentialTrace& tE) {
  if (!tH.grid.same_as(tE.grid)) throw Error(Errc::InvalidGrid, "trace grids differ");
  auto et = tE.tangential_part();
  cplx s = 0;
  for (int f = 0; f < 6; ++f) {
    auto fi = tH.face(f);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        std::size_t i = iu + std::size_t(fi.nu_count) * iv;
        s += tH.area_weight(f, iu, iv) * tH.faces[f][i].dot(et[f][i]);
      }
  }
  // Eigen's dot conjugates the first argument
  return std::conj(s);
}

cplx boundary_pairing(const TracePair& tH, const TracePair& tE) {
  return boundary_pairing(tH.omega, tE.omega) + boundary_pairing(tH.two_omega, tE.two_omega);
}

cplx volume_pairing(const ComplexVectorField& chi, const ComplexVectorField& E1w,
                    const ComplexVectorField& E12w, const ComplexVectorField& Etw,
                    const ComplexVectorField& Et2w, double omega) {
  const BoxGrid& g = chi.grid;
  for (const auto* f : {&E1w, &E12w, &Etw, &Et2w})
    if (!f->grid.same_as(g)) throw Error(Errc::InvalidGrid, "volume pairing grids differ");
  auto avg = [&](const ComplexVectorField& f, int i, int j, int k) {
    CVec3 s = CVec3::Zero();
    for (int c = 0; c < 8; ++c) s += f[g.index(i + (c & 1), j + ((c >> 1) & 1), k + (c >> 2))];
    return CVec3(s / 8.0);
  };
  cplx total = 0;
  for (int k = 0; k + 1 < g.n[2]; ++k)
    for (int j = 0; j + 1 < g.n[1]; ++j)
      for (int i = 0; i + 1 < g.n[0]; ++i) {
        CVec3 x = avg(chi, i, j, k);
        if (x.squaredNorm() == 0) continue;
        CVec3 a = avg(E1w, i, j, k), b = avg(E12w, i, j, k);
        CVec3 t1 = avg(Etw, i, j, k), t2 = avg(Et2w, i, j, k);
        CVec3 integrand = dotu(a.conjugate(), b) * t1.conjugate() + 2.0 * dotu(a, a) * t2.conjugate();
        total += dotu(x, integrand);
      }
  return -kI * omega * total * (g.h[0] * g.h[1] * g.h[2]);
}

}  // namespace shg
