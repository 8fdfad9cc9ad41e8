#include <cmath>
#include <algorithm>
#include <random>

#include "doctest.h"
#include "shg/cgo.hpp"
#include "shg/nonlinear.hpp"
#include "shg/yee.hpp"

using namespace shg;

namespace {

MaterialModel eps_bump(int n, double amp, double L = 1.0) {
  BoxGrid g = BoxGrid::cube(n, L);
  MaterialModel m = MaterialModel::vacuum(g);
  double w = 0.15 * L * L;
  m.eps = sample_scalar(g, [&](const Vec3& x) { return cplx(1.0 + amp * std::exp(-x.squaredNorm() / w)); });
  return m;
}

}  // namespace

TEST_CASE("documented direction set values") {
  CgoDirectionSet ds = build_cgo_directions(Vec3(2, 0, 0), 10, 1, Variant::V1);
  double S = std::sqrt(101.0), T = std::sqrt(99.0);
  CHECK(std::abs(ds.zeta1_omega(0) - kI) < 1e-14);
  CHECK(std::abs(ds.zeta1_omega(1) + S) < 1e-12);
  CHECK(std::abs(ds.zeta1_omega(2) - kI * T) < 1e-12);
  CHECK(std::abs(dotu(ds.zeta1_omega, ds.zeta1_omega) - 1.0) < 1e-12);
  CVec3 sum = ds.zeta1_omega.conjugate() + ds.zeta1_2omega + ds.zetaT_omega.conjugate();
  CHECK((sum - CVec3(-2.0 * kI, 0, 0)).norm() < 1e-12);
  CHECK(std::abs(ds.A1_omega(0) - 1.0) < 1e-14);
  CHECK(std::abs(ds.A1_omega(1) - kI * (1 + T) / S) < 1e-13);
  CHECK(ds.A1_omega(1).imag() == doctest::Approx(1.08955).epsilon(1e-5));
  CHECK(std::abs(ds.A1_omega(2) - 1.0) < 1e-14);
  CHECK(std::abs(dotu(ds.zeta1_omega, ds.A1_omega)) < 1e-12);
  CHECK(ds.AT_2omega.norm() == 0);
}

TEST_CASE("direction set invariants hold for random parameters") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0, 1);
  for (int s = 0; s < 200; ++s) {
    Vec3 xi(nd(rng), nd(rng), nd(rng));
    xi *= (0.1 + 20 * u(rng)) / xi.norm();
    double kappa = 0.1 + 3 * u(rng);
    double tau = kappa * (2 + 98 * u(rng));
    for (Variant v : {Variant::V1, Variant::V2, Variant::V3})
      for (Dispersion d : {Dispersion::Algebraic, Dispersion::Physical}) {
        CgoDirectionSet ds = build_cgo_directions(xi, tau, kappa, v, d);
        CHECK(ds.check().max() < 1e-10);
        double sgn = d == Dispersion::Algebraic ? 1 : -1;
        CHECK(std::abs(dotu(ds.zetaT_2omega, ds.zetaT_2omega) - sgn * 4 * kappa * kappa) <
              1e-10 * ds.zetaT_2omega.squaredNorm());
        CHECK((2.0 * ds.zeta1_omega + ds.zetaT_2omega.conjugate()).norm() < 1e-12 * ds.zeta1_omega.norm());
        // frame is orthonormal with e1 along xi
        CHECK((ds.frame.transpose() * ds.frame - Eigen::Matrix3d::Identity()).norm() < 1e-12);
        CHECK((ds.frame.col(0) - xi.normalized()).norm() < 1e-12);
      }
  }
}

TEST_CASE("direction set errors") {
  CHECK_THROWS_AS(build_cgo_directions(Vec3::Zero(), 10, 1, Variant::V1), Error);
  CHECK_THROWS_AS(build_cgo_directions(Vec3(1, 0, 0), 1.0, 1.0, Variant::V1), Error);
  CHECK_THROWS_AS(parse_variant("V4"), Error);
  CHECK(parse_variant("V2") == Variant::V2);
}

TEST_CASE("grid adaptation keeps the phase constraint and the discrete dispersion") {
  double h = 0.2 / 31;
  for (Vec3 xi : std::vector<Vec3>{Vec3(M_PI / 0.2, 0, 0), Vec3(4, -4, 4) * M_PI / 0.2, Vec3(-1, 3, 2) * M_PI / 0.2}) {
    CgoDirectionSet ds = build_cgo_directions(xi, 40, 1, Variant::V2, Dispersion::Physical);
    CgoDirectionSet ad = adapt_to_grid(ds, Vec3(h, h, h));
    CHECK(ad.grid_adapted());
    CHECK(ad.check().max() < 1e-10);
    CVec3 sum = ad.zeta1_omega.conjugate() + ad.zeta1_2omega + ad.zetaT_omega.conjugate();
    CHECK((sum + kI * xi.cast<cplx>()).norm() < 1e-10 * xi.norm());
    for (Channel c : {Channel::Omega, Channel::TwoOmega, Channel::ConjOmega}) {
      const CVec3& z = ad.zeta(c);
      cplx s = 0;
      for (int a = 0; a < 3; ++a) s += std::pow(2.0 * std::sinh(z(a) * h / 2.0) / h, 2);
      double k = harmonic_of(c);
      CHECK(std::abs(s + k * k) < 1e-9 * z.squaredNorm());
    }
  }
}

TEST_CASE("potential matrices") {
  MaterialModel vac = MaterialModel::vacuum(BoxGrid::cube(8, 1.0));
  PotentialFields p = potential_matrices(vac, 1.3);
  for (std::size_t i = 0; i < vac.grid.size(); ++i) {
    CHECK(p.V_at(i).norm() == 0);
    CHECK(p.q_eps[i] == cplx(0));
  }
  MaterialModel c = vac;
  c.eps = ScalarField(c.grid, 2.5);
  p = potential_matrices(c, 1.3);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    auto V = p.V_at(i);
    Eigen::Matrix<cplx, 6, 6> D = Eigen::Matrix<cplx, 6, 6>::Identity() * (1.69 * 1.5);
    CHECK((V - D).norm() < 1e-12);
    CHECK(std::abs(p.q_eps[i]) < 1e-12);
  }
  ScalarField bad(c.grid, -1.0);
  CHECK_THROWS_AS(potential_matrices(bad, c.mu, 1.0), Error);
}

TEST_CASE("q matches the analytic Laplacian of sqrt(eps) at second order") {
  // sqrt(eps) = 1 + a e^{-r^2/w}: Lap = a e^{-r^2/w} (4 r^2/w^2 - 6/w)
  double a = 0.3, w = 0.05;
  std::vector<double> errs;
  for (int n : {17, 33}) {
    BoxGrid g = BoxGrid::cube(n, 1.0);
    ScalarField eps = sample_scalar(g, [&](const Vec3& x) {
      double s = 1 + a * std::exp(-x.squaredNorm() / w);
      return cplx(s * s);
    });
    PotentialFields p = potential_matrices(eps, ScalarField(g, 1.0), 1.0);
    double err = 0;
    // differences wrap periodically, so the outer layer is skipped
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto pi = g.unindex(i);
      if (*std::min_element(pi.begin(), pi.end()) == 0 || *std::max_element(pi.begin(), pi.end()) == n - 1) continue;
      Vec3 x = g.position(i);
      double r2 = x.squaredNorm(), e = std::exp(-r2 / w);
      double q = a * e * (4 * r2 / (w * w) - 6 / w) / (1 + a * e);
      err = std::max(err, std::abs(p.q_eps[i] - q));
    }
    errs.push_back(err);
  }
  double order = std::log(errs[0] / errs[1]) / std::log(2.0);
  MESSAGE("q order " << order);
  CHECK(order > 1.7);
}

TEST_CASE("vacuum remainder vanishes and the field is a plane wave") {
  BoxGrid g = BoxGrid::cube(12, 1.0);
  MaterialModel m = MaterialModel::vacuum(g);
  CgoDirectionSet ds = build_cgo_directions(Vec3(2, 1, 0), 3, 1, Variant::V1, Dispersion::Physical);
  for (Channel c : {Channel::Omega, Channel::TwoOmega, Channel::ConjOmega}) {
    CgoRemainder r = solve_cgo_remainder(m, ds, c);
    CHECK(r.R.max_abs() == 0);
    CHECK(r.Q.max_abs() == 0);
    CHECK(r.report.iterations == 1);
    auto E = cgo_field(m, ds, c).first;
    auto pw = plane_wave(g, ds.zeta(c), ds.amplitude(c));
    CHECK((E - pw).max_abs() <= 1e-13 * pw.max_abs());
  }
  // |E| grows like e^{Re zeta.x}
  auto E = cgo_field(m, ds, Channel::Omega).first;
  Vec3 re = ds.zeta1_omega.real();
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double expect = std::exp(re.dot(g.position(i) - g.center())) * ds.A1_omega.norm();
    worst = std::max(worst, std::abs(E[i].norm() / expect - 1));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("tilde remainder decays with tau in a smooth medium") {
  MaterialModel m = eps_bump(16, 0.3);
  std::vector<double> taus{10, 20, 40}, norms;
  for (double tau : taus) {
    CgoDirectionSet ds = build_cgo_directions(Vec3(2, 0, 1), tau, 1, Variant::V1, Dispersion::Physical);
    // the omega-channel magnetic amplitude grows like tau, so only the tilde solution decays
    CgoRemainder r = solve_cgo_remainder(m, ds, Channel::ConjOmega);
    CHECK(r.report.contraction_ratio < 1);
    norms.push_back(r.report.R_lp);
  }
  CHECK(norms[1] < 0.7 * norms[0]);
  CHECK(norms[2] < 0.7 * norms[1]);
}

TEST_CASE("strong contrast at small tau diverges loudly") {
  MaterialModel m = eps_bump(12, 40.0);
  CgoDirectionSet ds = build_cgo_directions(Vec3(1, 0, 0), 1.5, 1, Variant::V1, Dispersion::Physical);
  CHECK_THROWS_AS(solve_cgo_remainder(m, ds, Channel::Omega), Error);
}

TEST_CASE("CGO fields satisfy the discrete Maxwell equations as h shrinks") {
  std::vector<double> res;
  for (int n : {12, 24}) {
    MaterialModel m = eps_bump(n, 0.2);
    CgoDirectionSet ds = build_cgo_directions(Vec3(1, 1, 0), 6, 1, Variant::V1, Dispersion::Physical);
    auto EH = cgo_field(m, ds, Channel::Omega);
    YeeGrid y(m.grid);
    YeeSolution s{y.nodes_to_edges(EH.first), y.nodes_to_faces(EH.second)};
    YeeSolution z{CVector(y.nedges(), 0.0), CVector(y.nfaces(), 0.0)};
    auto r = shg_residual(s, z, m, 1.0);
    res.push_back(std::max(r[0], r[1]));
  }
  MESSAGE("CGO residuals " << res[0] << " " << res[1]);
  CHECK(res[1] < 0.5 * res[0]);
}

TEST_CASE("probe traces match the sampled plane wave") {
  BoxGrid g = BoxGrid::cube(10, 1.0);
  CgoDirectionSet ds = build_cgo_directions(Vec3(0, 2, 1), 4, 1, Variant::V3, Dispersion::Physical);
  auto t = probe_trace(g, ds, Channel::TwoOmega);
  auto ref = tangential_trace(plane_wave(g, ds.zeta1_2omega, ds.A1_2omega));
  CHECK((t - ref).max_abs() <= 1e-13 * ref.max_abs());
}
