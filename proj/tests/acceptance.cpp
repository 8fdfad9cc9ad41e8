// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "shg/admittance.hpp"
#include "shg/cgo.hpp"
#include "shg/recon.hpp"

using namespace shg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// least-squares slope of log y against log x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// smooth compactly supported chi2 bump used by the reconstruction criteria
ComplexVectorField recon_chi(const BoxGrid& g, double amp = 0.5) {
  double L = g.extent[0], sig = L / 4.5, R = 0.4 * L;
  return sample_field(g, [&](const Vec3& x) {
    double r2 = x.squaredNorm(), q = r2 / (R * R);
    double b = q < 1 ? amp * std::exp(-r2 / (2 * sig * sig)) * std::exp(1 - 1 / (1 - q)) : 0.0;
    return CVec3(b, cplx(0, 0.5) * b, -0.25 * b);
  });
}

// Gaussian-bump medium on [-1/2, 1/2]^3 with chi2 vanishing near the boundary
MaterialModel bump_medium(int n, double chi_amp, const Vec3& chi_center = Vec3::Zero(), double eps_amp = 0.3) {
  BoxGrid g = BoxGrid::cube(n, 1.0);
  MaterialModel m = MaterialModel::vacuum(g);
  m.eps = sample_scalar(g, [&](const Vec3& x) { return cplx(1.0 + eps_amp * std::exp(-x.squaredNorm() / 0.05)); });
  m.chi2 = sample_field(g, [&](const Vec3& x) {
    double r2 = (x - chi_center).squaredNorm();
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

TracePair test_probe(const BoxGrid& g, double omega) {
  return {wave(g, omega, Vec3(1, 0, 0), CVec3(0, 0, 1)), wave(g, 2 * omega, Vec3(0, 1, 0), CVec3(1, 0, 0))};
}

Outcome c1_cgo_algebra() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int s = 0; s < 100; ++s) {
    Vec3 xi(nd(rng), nd(rng), nd(rng));
    xi *= (0.1 + 20 * u(rng)) / xi.norm();
    double kappa = 0.1 + 3 * u(rng);
    double tau = std::max(kappa, xi.norm()) * (1.01 + 20 * u(rng));
    Variant v = Variant(1 + int(u(rng) * 3) % 3);
    CgoDirectionSet ds = build_cgo_directions(xi, tau, kappa, v);
    auto inv = ds.check();
    worst = std::max(worst, inv.max());
  }
  return {worst <= 1e-10, fmt("max relative invariant violation %.2e over 100 sets", worst)};
}

Outcome c2_vacuum() {
  std::vector<double> hs, res;
  double rmax = 0, fmax = 0;
  for (int n : {16, 24, 32}) {
    MaterialModel m = MaterialModel::vacuum(BoxGrid::cube(n, 1.0));
    CgoDirectionSet ds = build_cgo_directions(Vec3(2, 1, 0), 3, 1, Variant::V1, Dispersion::Physical);
    for (Channel c : {Channel::Omega, Channel::TwoOmega, Channel::ConjOmega}) {
      CgoRemainder r = solve_cgo_remainder(m, ds, c);
      rmax = std::max({rmax, r.R.max_abs(), r.Q.max_abs()});
      auto E = cgo_field(m, ds, c).first;
      auto pw = plane_wave(m.grid, ds.zeta(c), ds.amplitude(c));
      fmax = std::max(fmax, (E - pw).max_abs() / pw.max_abs());
    }
    auto EH = cgo_field(m, ds, Channel::Omega);
    YeeGrid y(m.grid);
    YeeSolution s{y.nodes_to_edges(EH.first), y.nodes_to_faces(EH.second)};
    YeeSolution z{CVector(y.nedges(), 0.0), CVector(y.nfaces(), 0.0)};
    auto r = shg_residual(s, z, m, 1.0);
    hs.push_back(m.grid.h[0]);
    res.push_back(std::max(r[0], r[1]));
  }
  double order = fit_slope(hs, res);
  bool ok = rmax == 0 && fmax < 1e-13 && std::abs(order - 2) <= 0.3;
  return {ok, fmt("remainder max %.1e, field mismatch %.1e, residuals %.2e %.2e %.2e, order %.3f", rmax,
                  fmax, res[0], res[1], res[2], order)};
}

Outcome c3_forward() {
  MaterialModel m = bump_medium(24, 1.0);
  ShgSolver solver(m, 1.0);
  TangentialTrace fw = wave(m.grid, 1.0, Vec3(0, 0, 1), CVec3(1, 0, 0));
  TangentialTrace zero(m.grid);
  ShgSolution base = solver.solve(fw, zero);
  double res = 0;
  for (double r : base.report.residuals) res = std::max(res, r);
  std::vector<double> ss{1e-2, 5e-3, 2.5e-3}, fn, en;
  double ratio = base.report.max_contraction;
  for (double s : ss) {
    ShgSolution sol = solver.solve(s * fw, zero);
    ratio = std::max(ratio, sol.report.max_contraction);
    for (double r : sol.report.residuals) res = std::max(res, r);
    fn.push_back((s * fw).l2());
    en.push_back(sol.E_2omega.l2());
  }
  double slope = fit_slope(fn, en);
  bool ok = ratio < 1 && res <= 1e-8 && std::abs(slope - 2) <= 0.2;
  return {ok, fmt("iterations %d, max contraction %.3e, max residual %.2e, power slope %.4f",
                  base.report.iterations, ratio, res, slope)};
}

Outcome c4_linearization() {
  MaterialModel m = bump_medium(24, 1.0);
  AdmittanceMap am(m, 1.0);
  TracePair f = probe(m.grid, 1.0);
  TracePair lin = am.linear(f).output;
  TracePair t2 = am.second_order(f).tH;
  std::vector<double> ss{1e-2, 5e-3, 2.5e-3}, first, second;
  for (double s : ss) {
    TracePair d = am.nonlinear(cplx(s) * f).output - cplx(s) * lin;
    first.push_back(trace_pair_l2(cplx(1 / s) * d));
    second.push_back(trace_pair_l2(cplx(1 / (s * s)) * d - t2));
  }
  double a = fit_slope(ss, first), b = fit_slope(ss, second);
  return {a >= 0.7 && b >= 0.7, fmt("first-order remainder slope %.3f, second-order remainder slope %.3f", a, b)};
}

struct IdentityRun {
  double h = 0;
  double rel = 0;
  cplx B, V;
};

IdentityRun identity_at(int n) {
  MaterialModel m = bump_medium(n, 1.0);
  AdmittanceMap am(m, 1.0);
  TracePair f = probe(m.grid, 1.0), ft = test_probe(m.grid, 1.0);
  SecondOrderFields so = am.second_order(f);
  ShgSolver conj(m.conjugate(), 1.0);
  LinearSolution t1 = conj.system(1).solve_bvp(ft.omega), t2 = conj.system(2).solve_bvp(ft.two_omega);
  IdentityRun r;
  r.h = m.grid.h[0];
  r.B = boundary_pairing(so.tH, ft);
  r.V = volume_pairing(m.chi2, so.E1_omega, so.E1_2omega, t1.E, t2.E, 1.0);
  r.rel = std::abs(r.B - r.V) / std::abs(r.V);
  return r;
}

// identity constant C = max rel/h over the refinement; shared with criterion 9
double g_identity_C = -1;

Outcome c5_identity() {
  std::vector<IdentityRun> runs;
  for (int n : {16, 24, 32}) runs.push_back(identity_at(n));
  double c0 = runs[0].rel / runs[0].h, cmin = c0, cmax = c0;
  bool shrink = true;
  std::string d;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    double C = runs[i].rel / runs[i].h;
    cmin = std::min(cmin, C);
    cmax = std::max(cmax, C);
    d += fmt("n=%d rel %.3e C %.3f; ", 16 + 8 * int(i), runs[i].rel, C);
    if (i > 0 && runs[i - 1].rel / runs[i].rel < 1.3) shrink = false;
  }
  g_identity_C = cmax;
  // C stable: spread within a factor 2
  bool stable = cmax <= 2 * cmin;
  d += fmt("shrink factors %.3f %.3f", runs[0].rel / runs[1].rel, runs[1].rel / runs[2].rel);
  return {shrink && stable, d};
}

Outcome c6_remainder() {
  MaterialModel m = bump_medium(16, 0.0);
  std::vector<double> taus{20, 40, 80}, norms;
  for (double t : taus) {
    CgoDirectionSet ds = build_cgo_directions(Vec3(2, 0, 1), t, 1, Variant::V1, Dispersion::Physical);
    norms.push_back(solve_cgo_remainder(m, ds, Channel::ConjOmega).report.R_lp);
  }
  double e = fit_slope(taus, norms);
  return {e <= 0.05, fmt("L4 norms %.3e %.3e %.3e, tau exponent %.3f", norms[0], norms[1], norms[2], e)};
}

MaterialModel recon_truth(int n) {
  BoxGrid g = BoxGrid::cube(n, 0.2);
  MaterialModel m = MaterialModel::vacuum(g);
  m.chi2 = recon_chi(g);
  return m;
}

Outcome c7_fourier() {
  MaterialModel truth = recon_truth(32);
  MaterialModel known = MaterialModel::vacuum(truth.grid);
  auto xs = xi_lattice(truth.grid, 4);
  FourierChiData d = sample_fourier_data([&] { return oracle_source(truth, 1.0); }, known, 1.0, xs, 40);
  double worst = 0;
  ScalarField a = afactor(known.eps, known.eps0);
  ComplexVectorField achi = truth.chi2;
  for (std::size_t i = 0; i < achi.v.size(); ++i) achi[i] *= a[i];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CVec3 ref = node_fourier(achi, xs[i]);
    worst = std::max(worst, (d.F[i] - ref).norm() / ref.norm());
  }
  return {worst <= 0.1, fmt("%zu modes, worst per-mode relative error %.3e", xs.size(), worst)};
}

constexpr int kReconN = 24;
const std::vector<double> kReconS{1.0 / 256, 1.0 / 512};

Outcome c8_recon() {
  MaterialModel truth = recon_truth(kReconN);
  MaterialModel known = MaterialModel::vacuum(truth.grid);
  auto xs = xi_lattice(truth.grid, 4);
  ShgSolveOptions so;
  so.epsilon_ball = 1e300;
  so.tol = 1e-7;
  auto t0 = std::chrono::steady_clock::now();
  ReconResult ro = reconstruct_chi2([&] { return oracle_source(truth, 1.0); }, known, 1.0, xs, 40, {}, &truth.chi2);
  double t_or = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ReconResult rm = reconstruct_chi2([&] { return measured_source(truth, 1.0, kReconS, so); }, known, 1.0, xs, 40,
                                    {}, &truth.chi2);
  double t_me = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() - t_or;

  // a second, independently built copy of the medium gives the same data
  MaterialModel twin = recon_truth(kReconN);
  FourierChiData dt = sample_fourier_data([&] { return oracle_source(twin, 1.0); }, known, 1.0, xs, 40);
  double curl = 0, div = 0, scale = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CVec3 D = ro.data.F[i] - dt.F[i];
    CVec3 x = xs[i].cast<cplx>();
    curl = std::max(curl, x.cross(D).norm());
    div = std::max(div, std::abs(dotu(x, D)));
    scale = std::max(scale, xs[i].norm() * ro.data.F[i].norm());
  }
  curl /= scale;
  div /= scale;
  double eo = *ro.report.rel_l2_error, em = *rm.report.rel_l2_error;
  bool ok = eo <= 0.2 && em <= 0.4 && curl < 1e-6 && div < 1e-6;
  return {ok, fmt("n=%d, %zu modes: oracle error %.4f (%.0f s), measured error %.4f (%.0f s), "
                  "difference-data curl %.1e div %.1e",
                  kReconN, xs.size(), eo, t_or, em, t_me, curl, div)};
}

Outcome c9_uniqueness() {
  if (g_identity_C < 0) c5_identity();
  int n = 24;
  MaterialModel m1 = bump_medium(n, 1.0);
  MaterialModel m2 = bump_medium(n, 0.6, Vec3(0.05, -0.03, 0.02));
  TracePair f = probe(m1.grid, 1.0), ft = test_probe(m1.grid, 1.0);
  auto s1 = AdmittanceMap(m1, 1.0).second_order(f);
  auto s2 = AdmittanceMap(m2, 1.0).second_order(f);
  cplx dB = boundary_pairing(s1.tH - s2.tH, ft);
  ShgSolver conj(m1.conjugate(), 1.0);
  LinearSolution t1 = conj.system(1).solve_bvp(ft.omega), t2 = conj.system(2).solve_bvp(ft.two_omega);
  // the first-order fields coincide because eps and mu are equal
  ComplexVectorField dchi = m1.chi2 - m2.chi2;
  cplx dV = volume_pairing(dchi, s1.E1_omega, s1.E1_2omega, t1.E, t2.E, 1.0);
  double rel = std::abs(dB - dV) / std::abs(dV);
  double tol = g_identity_C * m1.grid.h[0];
  double sep = std::abs(dB) / std::abs(boundary_pairing(s1.tH, ft));
  bool ok = rel <= tol && sep > 1e-3;
  return {ok, fmt("data difference %.3e (relative), identity mismatch %.3e vs tolerance %.3e", sep, rel, tol)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Item {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  std::vector<Item> items{
      {1, "CGO algebra", 1, c1_cgo_algebra},
      {2, "vacuum exactness", 60, c2_vacuum},
      {3, "contraction forward solve", 300, c3_forward},
      {4, "linearization rates", 600, c4_linearization},
      {5, "key identity", 300, c5_identity},
      {6, "remainder decay", 300, c6_remainder},
      {7, "Fourier oracle equivalence", 900, c7_fourier},
      {8, "end-to-end reconstruction", 1800, c8_recon},
      {9, "uniqueness", 300, c9_uniqueness},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& it : items) {
    if (!only.empty() && !only.count(it.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass && dt <= it.budget;
    if (o.pass && !pass) o.detail += fmt("; over the %.0f s budget", it.budget);
    failed += !pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
