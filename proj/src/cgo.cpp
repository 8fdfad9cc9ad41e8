#include "shg/cgo.hpp"

#include <algorithm>
#include <cmath>

namespace shg {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::V1: return "V1";
    case Variant::V2: return "V2";
    case Variant::V3: return "V3";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "V1" || s == "1") return Variant::V1;
  if (s == "V2" || s == "2") return Variant::V2;
  if (s == "V3" || s == "3") return Variant::V3;
  throw Error(Errc::InvalidConfig, "unknown variant '" + s + "'");
}

int harmonic_of(Channel c) { return (c == Channel::TwoOmega || c == Channel::ConjTwoOmega) ? 2 : 1; }
bool is_conjugate(Channel c) { return c == Channel::ConjOmega || c == Channel::ConjTwoOmega; }

const CVec3& CgoDirectionSet::zeta(Channel c) const {
  switch (c) {
    case Channel::Omega: return zeta1_omega;
    case Channel::TwoOmega: return zeta1_2omega;
    case Channel::ConjOmega: return zetaT_omega;
    default: return zetaT_2omega;
  }
}

const CVec3& CgoDirectionSet::amplitude(Channel c) const {
  switch (c) {
    case Channel::Omega: return A1_omega;
    case Channel::TwoOmega: return A1_2omega;
    case Channel::ConjOmega: return AT_omega;
    default: return AT_2omega;
  }
}

const CVec3& CgoDirectionSet::b_amplitude(Channel c) const {
  switch (c) {
    case Channel::Omega: return B1_omega;
    case Channel::TwoOmega: return B1_2omega;
    case Channel::ConjOmega: return BT_omega;
    default: return BT_2omega;
  }
}

namespace {

CVec3 hat(const CVec3& z, const Vec3& h) {
  CVec3 r;
  for (int a = 0; a < 3; ++a) r(a) = 2.0 * std::sinh(z(a) * h(a) / 2.0) / h(a);
  return r;
}

CVec3 coshalf(const CVec3& z, const Vec3& h) {
  CVec3 r;
  for (int a = 0; a < 3; ++a) r(a) = std::cosh(z(a) * h(a) / 2.0);
  return r;
}

CVec3 project_transverse(const CVec3& zh, const CVec3& A) {
  cplx zz = zh.squaredNorm();
  return A - dotu(zh, A) * zh.conjugate() / zz;
}

}  // namespace

CVec3 CgoDirectionSet::product_amplitude(Channel c) const {
  if (!grid_adapted()) return amplitude(c);
  return amplitude(c).cwiseProduct(coshalf(zeta(c), grid_h));
}

CVec3 CgoDirectionSet::node_amplitude(Channel c) const {
  if (!grid_adapted()) return amplitude(c);
  return amplitude(c).cwiseQuotient(coshalf(zeta(c), grid_h));
}

CVec3 CgoDirectionSet::weight() const {
  CVec3 a1 = product_amplitude(Channel::Omega);
  CVec3 a2 = product_amplitude(Channel::TwoOmega);
  CVec3 at = product_amplitude(Channel::ConjOmega);
  return dotu(a1.conjugate(), a2) * at.conjugate();
}

double CgoDirectionSet::Violations::max() const {
  return std::max({dispersion, phase, phase2, transversality, pairing});
}

CgoDirectionSet::Violations CgoDirectionSet::check() const {
  Violations v;
  double sgn = mode == Dispersion::Algebraic ? 1.0 : -1.0;
  double scale = std::max(1.0, zeta1_omega.squaredNorm());
  Channel chans[4] = {Channel::Omega, Channel::TwoOmega, Channel::ConjOmega, Channel::ConjTwoOmega};
  for (Channel c : chans) {
    // in an adapted set the conjugate 2w probe has zero amplitude and is not used
    if (grid_adapted() && c == Channel::ConjTwoOmega) continue;
    int hm = harmonic_of(c);
    const CVec3& z = zeta(c);
    CVec3 zh = grid_adapted() ? hat(z, grid_h) : z;
    double k2 = hm * hm * kappa * kappa;
    v.dispersion = std::max(v.dispersion, std::abs(dotu(zh, zh) - sgn * k2) / scale);
    const CVec3& A = amplitude(c);
    if (A.norm() > 0)
      v.transversality = std::max(v.transversality, std::abs(dotu(zh, A)) / (zh.norm() * A.norm()));
    const CVec3& B = b_amplitude(c);
    double om = hm * omega();
    CVec3 expect =
        mode == Dispersion::Algebraic ? CVec3(crossc(zh, A) / (om * mu0)) : CVec3(crossc(zh, A) / (kI * om * mu0));
    if (A.norm() > 0) v.pairing = std::max(v.pairing, (B - expect).norm() / expect.norm());
  }
  CVec3 ph = zeta1_omega.conjugate() + zeta1_2omega + zetaT_omega.conjugate() + kI * xi.cast<cplx>();
  v.phase = ph.norm() / std::sqrt(scale);
  v.phase2 = (2.0 * zeta1_omega + zetaT_2omega.conjugate()).norm() / std::sqrt(scale);
  return v;
}

CgoDirectionSet build_cgo_directions(const Vec3& xi, double tau, double kappa, Variant variant,
                                     Dispersion mode, double eps0, double mu0) {
  double x1 = xi.norm();
  if (!(x1 > 0) || !std::isfinite(x1)) throw Error(Errc::InvalidXi, "xi must be nonzero");
  if (!(tau > kappa)) throw Error(Errc::InvalidTau, "tau must exceed kappa");
  CgoDirectionSet d;
  d.xi = xi;
  d.tau = tau;
  d.kappa = kappa;
  d.variant = variant;
  d.mode = mode;
  d.eps0 = eps0;
  d.mu0 = mu0;
  Vec3 e1 = xi / x1;
  // e2 carries the real growth of every zeta; among unit vectors orthogonal to
  // e1 the l1 norm (growth across a box) is smallest when a component vanishes
  Vec3 e2 = Vec3::Zero();
  double best = INFINITY;
  for (int k : {2, 1, 0}) {
    Vec3 c = Vec3::Unit(k).cross(e1);
    if (c.norm() < 1e-8) continue;
    c.normalize();
    if (c.lpNorm<1>() < best - 1e-12) {
      best = c.lpNorm<1>();
      e2 = c;
    }
  }
  Vec3 e3 = e1.cross(e2);
  d.frame.col(0) = e1;
  d.frame.col(1) = e2;
  d.frame.col(2) = e3;
  CVec3 c1 = e1.cast<cplx>();
  CVec3 f2 = (variant == Variant::V3 ? e3 : e2).cast<cplx>();
  CVec3 f3 = (variant == Variant::V3 ? e2 : e3).cast<cplx>();
  double S = std::sqrt(x1 * x1 / 4 + tau * tau);
  double T = mode == Dispersion::Algebraic ? std::sqrt(tau * tau - kappa * kappa)
                                           : std::sqrt(tau * tau + kappa * kappa);
  d.zeta1_omega = kI * (x1 / 2) * c1 - S * f2 + kI * T * f3;
  d.zeta1_2omega = -kI * x1 * c1 + 2 * S * f2 + 2.0 * kI * T * f3;
  d.zetaT_omega = -kI * (x1 / 2) * c1 - S * f2 + kI * T * f3;
  d.zetaT_2omega = kI * x1 * c1 + 2 * S * f2 + 2.0 * kI * T * f3;
  d.A1_omega = c1 + ((-kI * x1 / 2.0 - kI * T) / (-S)) * f2 + f3;
  d.A1_2omega = c1 + f2 + ((kI * x1 / 2.0 - S) / (kI * T)) * f3;
  switch (variant) {
    case Variant::V1:
    case Variant::V3: d.AT_omega = f2 + (S / (kI * T)) * f3; break;
    case Variant::V2: d.AT_omega = c1 + f2 + ((kI * x1 / 2.0 + S) / (kI * T)) * f3; break;
  }
  d.AT_2omega = CVec3::Zero();
  double om = d.omega();
  auto bfor = [&](const CVec3& z, const CVec3& A, int hm) -> CVec3 {
    if (mode == Dispersion::Algebraic) return crossc(z, A) / (hm * om * mu0);
    return crossc(z, A) / (kI * double(hm) * om * mu0);
  };
  d.B1_omega = bfor(d.zeta1_omega, d.A1_omega, 1);
  d.B1_2omega = bfor(d.zeta1_2omega, d.A1_2omega, 2);
  d.BT_omega = bfor(d.zetaT_omega, d.AT_omega, 1);
  d.BT_2omega = bfor(d.zetaT_2omega, d.AT_2omega, 2);
  return d;
}

namespace {

cplx disp(const CVec3& z, double k, const Vec3& h) {
  CVec3 zh = hat(z, h);
  return dotu(zh, zh) + k * k;
}

CVec3 disp_grad(const CVec3& z, const Vec3& h) {
  return 2.0 * hat(z, h).cwiseProduct(coshalf(z, h));
}

void adapt_step(CgoDirectionSet& d, const Vec3& h) {
  // unknowns u = conj(z1w), t = conj(zTw); z12w = -i xi - u - t. Minimum-norm
  // Newton steps on the three dispersion residuals.
  double k = d.kappa;
  CVec3 u = d.zeta1_omega.conjugate(), t = d.zetaT_omega.conjugate();
  CVec3 mxi = -kI * d.xi.cast<cplx>();
  bool ok = false;
  for (int it = 0; it < 80; ++it) {
    CVec3 v = mxi - u - t;
    Eigen::Vector3cd r(disp(u, k, h), disp(t, k, h), disp(v, 2 * k, h));
    double scale = hat(u, h).squaredNorm();
    double r0 = r.cwiseAbs().maxCoeff();
    if (r0 < 1e-14 * scale) {
      ok = true;
      break;
    }
    CVec3 gu = disp_grad(u, h), gt = disp_grad(t, h), gv = disp_grad(v, h);
    Eigen::Matrix<cplx, 3, 6> J = Eigen::Matrix<cplx, 3, 6>::Zero();
    J.block<1, 3>(0, 0) = gu.transpose();
    J.block<1, 3>(1, 3) = gt.transpose();
    J.block<1, 3>(2, 0) = -gv.transpose();
    J.block<1, 3>(2, 3) = -gv.transpose();
    Eigen::Matrix3cd JJ = J * J.adjoint();
    Eigen::Matrix<cplx, 6, 1> step = J.adjoint() * JJ.partialPivLu().solve(r);
    double lam = 1;
    for (int bt = 0; bt < 30; ++bt, lam *= 0.5) {
      CVec3 u1 = u - lam * step.head<3>(), t1 = t - lam * step.tail<3>();
      Eigen::Vector3cd rn(disp(u1, k, h), disp(t1, k, h), disp(mxi - u1 - t1, 2 * k, h));
      if (rn.cwiseAbs().maxCoeff() < r0) break;
    }
    u -= lam * step.head<3>();
    t -= lam * step.tail<3>();
  }
  if (!ok) throw Error(Errc::NoConvergence, "grid adaptation of the direction set did not converge");
  d.zeta1_omega = u.conjugate();
  d.zetaT_omega = t.conjugate();
  d.zeta1_2omega = mxi - u - t;
  d.zetaT_2omega = -2.0 * d.zeta1_omega.conjugate();
}

}  // namespace

CgoDirectionSet adapt_to_grid(const CgoDirectionSet& ds, const Vec3& h, int steps) {
  if (ds.mode != Dispersion::Physical)
    throw Error(Errc::ConstraintViolated, "grid adaptation needs a physical-mode direction set");
  CgoDirectionSet d = ds;
  for (int j = 1; j <= steps; ++j) adapt_step(d, h * (double(j) / steps));
  d.grid_h = h;
  double om = d.omega();
  auto fix = [&](Channel c, CVec3& A, CVec3& B) {
    CVec3 zh = hat(d.zeta(c), h);
    if (A.norm() > 0) A = project_transverse(zh, A);
    B = crossc(zh, A) / (kI * double(harmonic_of(c)) * om * d.mu0);
  };
  fix(Channel::Omega, d.A1_omega, d.B1_omega);
  fix(Channel::TwoOmega, d.A1_2omega, d.B1_2omega);
  fix(Channel::ConjOmega, d.AT_omega, d.BT_omega);
  d.AT_2omega = CVec3::Zero();
  d.BT_2omega = CVec3::Zero();
  return d;
}

Eigen::Matrix<cplx, 6, 6> PotentialFields::V_at(std::size_t i) const {
  auto cross_mat = [](const CVec3& w) {
    CMat3 m;
    m << 0.0, -w(2), w(1), w(2), 0.0, -w(0), -w(1), w(0), 0.0;
    return m;
  };
  Eigen::Matrix<cplx, 6, 6> V;
  V.block<3, 3>(0, 0) = V11[i];
  V.block<3, 3>(0, 3) = cross_mat(w12[i]);
  V.block<3, 3>(3, 0) = cross_mat(w21[i]);
  V.block<3, 3>(3, 3) = V22[i];
  return V;
}

PotentialFields potential_matrices(const ScalarField& eps, const ScalarField& mu, double omega,
                                   double eps0, double mu0) {
  const BoxGrid& g = eps.grid;
  std::size_t N = g.size();
  PotentialFields P;
  P.grid = g;
  P.omega = omega;
  P.M0_eps = std::sqrt(eps0);
  P.M0_mu = std::sqrt(mu0);
  std::vector<cplx> le(N), lm(N), se(N), sm(N), prod(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(eps[i].real() > 0) || !(mu[i].real() > 0))
      throw Error(Errc::BranchError, "nonpositive real part in eps or mu");
    le[i] = std::log(eps[i]);
    lm[i] = std::log(mu[i]);
    se[i] = std::sqrt(eps[i]);
    sm[i] = std::sqrt(mu[i]);
    prod[i] = eps[i] * mu[i];
  }
  auto idx = [&](std::array<int, 3> p) {
    for (int a = 0; a < 3; ++a) p[a] = (p[a] % g.n[a] + g.n[a]) % g.n[a];
    return g.index(p[0], p[1], p[2]);
  };
  auto hess = [&](const std::vector<cplx>& f, const std::array<int, 3>& p) {
    CMat3 H;
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        cplx v;
        if (a == b) {
          auto pp = p, pm = p;
          pp[a] += 1;
          pm[a] -= 1;
          v = (f[idx(pp)] - 2.0 * f[idx(p)] + f[idx(pm)]) / (g.h[a] * g.h[a]);
        } else {
          cplx s = 0;
          for (int sa : {1, -1})
            for (int sb : {1, -1}) {
              auto q = p;
              q[a] += sa;
              q[b] += sb;
              s += double(sa * sb) * f[idx(q)];
            }
          v = s / (4 * g.h[a] * g.h[b]);
        }
        H(a, b) = H(b, a) = v;
      }
    return H;
  };
  auto grad = [&](const std::vector<cplx>& f, const std::array<int, 3>& p) {
    CVec3 r;
    for (int a = 0; a < 3; ++a) {
      auto pp = p, pm = p;
      pp[a] += 1;
      pm[a] -= 1;
      r(a) = (f[idx(pp)] - f[idx(pm)]) / (2 * g.h[a]);
    }
    return r;
  };
  P.V11.resize(N);
  P.V22.resize(N);
  P.w12.resize(N);
  P.w21.resize(N);
  P.q_eps.resize(N);
  P.q_mu.resize(N);
  P.M_eps = se;
  P.M_mu = sm;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        std::array<int, 3> p{i, j, k};
        std::size_t id = g.index(i, j, k);
        cplx diag = omega * omega * (prod[id] - mu0 * eps0);
        P.V11[id] = CMat3::Identity() * diag + hess(le, p);
        P.V22[id] = CMat3::Identity() * diag + hess(lm, p);
        CVec3 gp = grad(prod, p);
        P.w12[id] = kI * omega / eps[id] * gp;
        P.w21[id] = -kI * omega / mu[id] * gp;
        P.q_eps[id] = hess(se, p).trace() / se[id];
        P.q_mu[id] = hess(sm, p).trace() / sm[id];
      }
  return P;
}

PotentialFields potential_matrices(const MaterialModel& m, double omega, int harmonic) {
  return potential_matrices(m.eps_at(harmonic), m.mu_at(harmonic), omega * harmonic, m.eps0,
                            m.mu0);
}

ScalarField extend_to_supercell(const ScalarField& f, cplx background, const Supercell& sc) {
  const BoxGrid& c = sc.cell;
  const BoxGrid& d = sc.domain;
  double margin = INFINITY;
  for (int a = 0; a < 3; ++a) {
    margin = std::min(margin, sc.offset[a] * c.h[a]);
    margin = std::min(margin, (c.n[a] - sc.offset[a] - d.n[a]) * c.h[a]);
  }
  double width = 0.5 * margin;
  auto step = [](double t) {
    if (t <= 0) return 1.0;
    if (t >= 1) return 0.0;
    double a = std::exp(-1.0 / (1 - t)), b = std::exp(-1.0 / t);
    return a / (a + b);
  };
  ScalarField out(c);
  for (int k = 0; k < c.n[2]; ++k)
    for (int j = 0; j < c.n[1]; ++j)
      for (int i = 0; i < c.n[0]; ++i) {
        std::array<int, 3> p{i - sc.offset[0], j - sc.offset[1], k - sc.offset[2]};
        double dist2 = 0;
        for (int a = 0; a < 3; ++a) {
          int q = std::clamp(p[a], 0, d.n[a] - 1);
          dist2 += std::pow((p[a] - q) * c.h[a], 2);
          p[a] = q;
        }
        cplx v = f[d.index(p[0], p[1], p[2])];
        out[c.index(i, j, k)] = background + (v - background) * step(std::sqrt(dist2) / width);
      }
  return out;
}

namespace {

ComplexVectorField apply_kernel(const ComplexVectorField& f, const FaddeevKernel& k) {
  // the potential may extend into the blending margin, so no support check
  ComplexVectorField g = f;
  const Supercell& sc = k.supercell;
  Fft3 fft(sc.cell.n);
  std::size_t N = sc.cell.size();
  auto P = sc.period();
  Vec3 th(2 * M_PI * k.shift / P[0], 2 * M_PI * k.shift / P[1], 2 * M_PI * k.shift / P[2]);
  std::vector<cplx> ph(N);
  for (std::size_t i = 0; i < N; ++i)
    ph[i] = std::exp(kI * th.dot(sc.cell.position(i) - sc.cell.center()));
  std::vector<cplx> buf(N);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < N; ++i) buf[i] = std::conj(ph[i]) * f[i](c);
    fft.forward(buf);
    for (std::size_t i = 0; i < N; ++i) buf[i] *= k.symbol[i];
    fft.inverse(buf);
    for (std::size_t i = 0; i < N; ++i) g[i](c) = ph[i] * buf[i];
  }
  return g;
}

double lp_norm_pair(const ComplexVectorField& a, const ComplexVectorField& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) s += a[i].squaredNorm() + b[i].squaredNorm();
  return std::sqrt(s);
}

}  // namespace

CgoRemainder solve_cgo_remainder(const MaterialModel& m, const CgoDirectionSet& ds, Channel which,
                                 const CgoOptions& opts) {
  if (ds.mode != Dispersion::Physical || ds.grid_adapted())
    throw Error(Errc::ConstraintViolated, "remainder solve needs a continuum physical-mode set");
  int hm = harmonic_of(which);
  MaterialModel mat = is_conjugate(which) ? m.conjugate() : m;
  double om = ds.omega() * hm;
  double kap = ds.kappa * hm;
  const CVec3& zeta = ds.zeta(which);
  const CVec3& A = ds.amplitude(which);
  const CVec3& B = ds.b_amplitude(which);
  CgoRemainder out;
  out.R = ComplexVectorField(m.grid);
  out.Q = ComplexVectorField(m.grid);
  Supercell sc = Supercell::make(m.grid, opts.supercell_factor);
  ScalarField eps = extend_to_supercell(mat.eps_at(hm), mat.eps0, sc);
  ScalarField mu = extend_to_supercell(mat.mu_at(hm), mat.mu0, sc);
  PotentialFields P = potential_matrices(eps, mu, om, mat.eps0, mat.mu0);
  std::size_t N = sc.cell.size();
  double vmax = 0;
  for (std::size_t i = 0; i < N; ++i)
    vmax = std::max({vmax, P.V11[i].norm(), P.V22[i].norm(), P.w12[i].norm(), std::abs(P.q_eps[i]),
                     std::abs(P.q_mu[i])});
  out.report.iterations = 1;
  if (vmax == 0) return out;  // vacuum: the leading term is exact

  FaddeevKernel K = faddeev_kernel(zeta, sc, kap, 1e-8, -1, 0.5);
  CVec3 ue0 = P.M0_eps * A, uh0 = P.M0_mu * B;
  ComplexVectorField ue(sc.cell), uh(sc.cell);
  for (std::size_t i = 0; i < N; ++i) {
    ue[i] = ue0;
    uh[i] = uh0;
  }
  double prev_update = 0;
  int bad = 0;
  double ratio = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    ComplexVectorField fe(sc.cell), fh(sc.cell);
    for (std::size_t i = 0; i < N; ++i) {
      fe[i] = (P.V11[i] - P.q_eps[i] * CMat3::Identity()) * ue[i] +
              P.M_eps[i] * crossc(P.w12[i], uh[i] / P.M_mu[i]);
      fh[i] = (P.V22[i] - P.q_mu[i] * CMat3::Identity()) * uh[i] +
              P.M_mu[i] * crossc(P.w21[i], ue[i] / P.M_eps[i]);
    }
    ComplexVectorField ge = apply_kernel(fe, K), gh = apply_kernel(fh, K);
    ComplexVectorField ne(sc.cell), nh(sc.cell);
    for (std::size_t i = 0; i < N; ++i) {
      ne[i] = ue0 + ge[i];
      nh[i] = uh0 + gh[i];
    }
    ComplexVectorField de = ne - ue, dh = nh - uh;
    double upd = lp_norm_pair(de, dh);
    double size = lp_norm_pair(ne, nh);
    ue = std::move(ne);
    uh = std::move(nh);
    out.report.iterations = it + 1;
    if (it >= 2 && prev_update > 0) {
      ratio = upd / prev_update;
      out.report.contraction_ratio = std::max(out.report.contraction_ratio, ratio);
      bad = ratio >= 1 ? bad + 1 : 0;
      if (bad >= 2 || !std::isfinite(upd))
        throw Error(Errc::NeumannDiverged,
                    "series ratio " + std::to_string(ratio) + " >= 1; increase tau");
    }
    prev_update = upd;
    out.report.final_update = upd / size;
    if (upd <= opts.tol * size) break;
    if (it == opts.max_iter) throw Error(Errc::NoConvergence, "Neumann series did not converge");
  }
  ComplexVectorField ued = sc.restrict_to_domain(ue), uhd = sc.restrict_to_domain(uh);
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    out.R[i] = ued[i] / P.M0_eps - A;
    out.Q[i] = uhd[i] / P.M0_mu - B;
  }
  out.report.R_lp = field_norm_lp(out.R, opts.p);
  out.report.Q_lp = field_norm_lp(out.Q, opts.p);
  return out;
}

ComplexVectorField plane_wave(const BoxGrid& g, const CVec3& zeta, const CVec3& A) {
  Vec3 c = g.center();
  ComplexVectorField out(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = std::exp(dotu(zeta, (g.position(i) - c).cast<cplx>())) * A;
  return out;
}

std::pair<ComplexVectorField, ComplexVectorField> cgo_field(const MaterialModel& m,
                                                            const CgoDirectionSet& ds,
                                                            Channel which, const CgoOptions& opts,
                                                            CgoRemainderReport* rep) {
  const CVec3& zeta = ds.zeta(which);
  if (ds.grid_adapted()) {
    // staggered plane wave sampled on nodes; only valid in vacuum
    for (std::size_t i = 0; i < m.grid.size(); ++i)
      if (m.eps[i] != cplx(m.eps0) || m.mu[i] != cplx(m.mu0))
        throw Error(Errc::ConstraintViolated, "grid-adapted probes are vacuum-only");
    CVec3 ch = coshalf(zeta, ds.grid_h);
    CVec3 Bn = ds.b_amplitude(which);
    for (int a = 0; a < 3; ++a) Bn(a) /= ch((a + 1) % 3) * ch((a + 2) % 3);
    if (rep) *rep = CgoRemainderReport{};
    return {plane_wave(m.grid, zeta, ds.node_amplitude(which)), plane_wave(m.grid, zeta, Bn)};
  }
  CgoRemainder r = solve_cgo_remainder(m, ds, which, opts);
  if (rep) *rep = r.report;
  int hm = harmonic_of(which);
  MaterialModel mat = is_conjugate(which) ? m.conjugate() : m;
  const ScalarField& eps = mat.eps_at(hm);
  const ScalarField& mu = mat.mu_at(hm);
  const BoxGrid& g = m.grid;
  Vec3 c = g.center();
  ComplexVectorField E(g), H(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx ex = std::exp(dotu(zeta, (g.position(i) - c).cast<cplx>()));
    E[i] = ex * std::sqrt(mat.eps0) / std::sqrt(eps[i]) * (ds.amplitude(which) + r.R[i]);
    H[i] = ex * std::sqrt(mat.mu0) / std::sqrt(mu[i]) * (ds.b_amplitude(which) + r.Q[i]);
  }
  return {E, H};
}

TangentialTrace probe_trace(const BoxGrid& g, const CgoDirectionSet& ds, Channel which) {
  return tangential_trace(plane_wave(g, ds.zeta(which), ds.node_amplitude(which)));
}

}  // namespace shg
