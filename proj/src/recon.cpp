#include "shg/recon.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace shg {

ScalarField afactor(const ScalarField& eps, double eps0) {
  ScalarField a(eps.grid);
  double e32 = std::pow(eps0, 1.5);
  for (std::size_t i = 0; i < eps.v.size(); ++i) {
    cplx e = eps[i];
    if (!(e.real() > 0) || !std::isfinite(std::abs(e)))
      throw Error(Errc::BranchError, "afactor needs Re eps > 0");
    a[i] = e32 / (e * std::sqrt(std::conj(e)));
  }
  return a;
}

SecondOrderSource oracle_source(const MaterialModel& truth, double omega) {
  auto map = std::make_shared<AdmittanceMap>(truth, omega);
  return [map](const TracePair& f) { return map->second_order(f).tH; };
}

SecondOrderSource measured_source(const MaterialModel& truth, double omega,
                                  std::vector<double> s_list, const ShgSolveOptions& opts) {
  auto map = std::make_shared<AdmittanceMap>(truth, omega, opts);
  return [map, s_list](const TracePair& f) {
    AdmittanceFn nl = [&](const TracePair& g) { return map->nonlinear(g).output; };
    AdmittanceFn lin = [&](const TracePair& g) { return map->linear(g).output; };
    return extract_second_order_trace(nl, lin, f, s_list).trace;
  };
}

namespace {

bool is_background(const MaterialModel& m) {
  auto flat = [](const ScalarField& f, double v) {
    for (const auto& x : f.v)
      if (x != cplx(v)) return false;
    return true;
  };
  return flat(m.eps, m.eps0) && flat(m.mu, m.mu0) && !m.eps_2w && !m.mu_2w;
}

}  // namespace

CgoDirectionSet probe_directions(const MaterialModel& m, double omega, const Vec3& xi, double tau,
                                 Variant v, const FourierSampleOptions& opts) {
  const BoxGrid& g = m.grid;
  double kappa = omega * std::sqrt(m.eps0 * m.mu0);
  CgoDirectionSet ds = build_cgo_directions(xi, tau, kappa, v, Dispersion::Physical, m.eps0, m.mu0);
  if (opts.grid_adapt && is_background(m)) ds = adapt_to_grid(ds, Vec3(g.h[0], g.h[1], g.h[2]));
  return ds;
}

namespace {

CVec3 sample_at_tau(const SecondOrderSource& src, const MaterialModel& m, double omega,
                    const Vec3& xi, double tau, const FourierSampleOptions& opts,
                    FourierSample* diag) {
  std::size_t nv = opts.variants.size();
  if (nv < 3) throw Error(Errc::IllPosedDirections, "need at least three variants");
  Eigen::MatrixXcd W(nv, 3);
  Eigen::VectorXcd rhs(nv);
  if (diag) {
    diag->pairings.clear();
    diag->weights.clear();
  }
  for (std::size_t r = 0; r < nv; ++r) {
    CgoDirectionSet ds = probe_directions(m, omega, xi, tau, opts.variants[r], opts);
    TangentialTrace f1 = tangential_trace(cgo_field(m, ds, Channel::Omega, opts.cgo).first);
    TangentialTrace f2 = tangential_trace(cgo_field(m, ds, Channel::TwoOmega, opts.cgo).first);
    TangentialTrace ft = tangential_trace(cgo_field(m, ds, Channel::ConjOmega, opts.cgo).first);
    // unit amplitude at the domain center; the boundary values then grow like
    // e^{|Re zeta| L/2} and the product of the three fields stays O(1) on supp chi
    double c1 = 1.0 / ds.node_amplitude(Channel::Omega).norm();
    double c2 = 1.0 / ds.node_amplitude(Channel::TwoOmega).norm();
    double c3 = 1.0 / ds.node_amplitude(Channel::ConjOmega).norm();
    TracePair tH = src(TracePair{cplx(c1) * f1, cplx(c2) * f2});
    cplx b = boundary_pairing(tH.omega, cplx(c3) * ft) / (c1 * c2 * c3);
    CVec3 w = ds.weight();
    W.row(r) = w.transpose();
    rhs(r) = b / (-kI * omega);
    if (diag) {
      diag->pairings.push_back(b);
      diag->weights.push_back(w);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto sv = svd.singularValues();
  double cond = sv(2) > 0 ? sv(0) / sv(2) : INFINITY;
  if (diag) diag->condition = cond;
  if (!(cond <= opts.max_condition))
    throw Error(Errc::IllPosedDirections, "weight system condition " + std::to_string(cond));
  return svd.solve(rhs);
}

}  // namespace

FourierSample fourier_sample_chi(const SecondOrderSource& src, const MaterialModel& m, double omega,
                                 const Vec3& xi, double tau, const FourierSampleOptions& opts) {
  if (!(xi.norm() > 0)) throw Error(Errc::InvalidXi, "xi must be nonzero");
  FourierSample out;
  out.xi = xi;
  out.F = sample_at_tau(src, m, omega, xi, tau, opts, &out);
  if (!opts.tau_sweep.empty()) {
    FourierSampleOptions o = opts;
    o.tau_sweep.clear();
    for (double t : opts.tau_sweep) out.tau_values.push_back(sample_at_tau(src, m, omega, xi, t, o, nullptr));
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < out.tau_values.size(); ++i)
      d.push_back((out.tau_values[i + 1] - out.tau_values[i]).norm() /
                  std::max(out.tau_values[i + 1].norm(), 1e-300));
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
      if (d[i + 1] > d[i])
        throw Error(Errc::TauNotAsymptotic, "tau-sweep differences are not decreasing");
    if (!d.empty()) out.tau_delta = d.back();
  }
  return out;
}

std::vector<Vec3> xi_lattice(const BoxGrid& g, int mmax) {
  std::vector<Vec3> out;
  for (int a = -mmax; a <= mmax; ++a)
    for (int b = -mmax; b <= mmax; ++b)
      for (int c = -mmax; c <= mmax; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        out.emplace_back(M_PI * a / g.extent[0], M_PI * b / g.extent[1], M_PI * c / g.extent[2]);
      }
  return out;
}

FourierChiData sample_fourier_data(const SourceFactory& make_src, const MaterialModel& m,
                                   double omega, const std::vector<Vec3>& xi_grid, double tau,
                                   const ReconOptions& opts) {
  std::size_t n = xi_grid.size();
  FourierChiData d;
  d.xi = xi_grid;
  d.F.assign(n, CVec3::Zero());
  d.condition.assign(n, 0);
  d.tau_delta.assign(n, 0);
  int jobs = std::max(1, opts.jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(jobs);
  auto work = [&](int w) {
    try {
      SecondOrderSource src = make_src();
      for (std::size_t i = next++; i < n; i = next++) {
        FourierSample s = fourier_sample_chi(src, m, omega, xi_grid[i], tau, opts.sample);
        d.F[i] = s.F;
        d.condition[i] = s.condition;
        d.tau_delta[i] = s.tau_delta;
      }
    } catch (...) {
      errs[w] = std::current_exception();
      next = n;
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return d;
}

ComplexVectorField invert_fourier(const FourierChiData& data, const BoxGrid& g, CVec3* dc,
                                  int* missing) {
  Supercell sc = Supercell::make(g);
  const BoxGrid& c = sc.cell;
  auto P = sc.period();
  Vec3 xc = g.center();
  std::map<std::array<int, 3>, CVec3> modes;
  int mmax = 0;
  for (std::size_t i = 0; i < data.xi.size(); ++i) {
    std::array<int, 3> m{};
    for (int a = 0; a < 3; ++a) {
      double q = data.xi[i](a) * P[a] / (2 * M_PI);
      m[a] = int(std::lround(q));
      if (std::abs(q - m[a]) > 1e-6) throw Error(Errc::InvalidXi, "xi is not on the super-cell lattice");
      mmax = std::max(mmax, std::abs(m[a]));
    }
    modes[m] = data.F[i];
  }
  int M = 2 * mmax + 1;
  if (missing) *missing = M * M * M - 1 - int(modes.size());
  // separable synthesis over the super-cell
  std::array<Eigen::MatrixXcd, 3> ph;
  for (int a = 0; a < 3; ++a) {
    ph[a].resize(c.n[a], M);
    for (int i = 0; i < c.n[a]; ++i)
      for (int m = -mmax; m <= mmax; ++m) {
        double x = c.origin[a] + i * c.h[a] - xc(a);
        ph[a](i, m + mmax) = std::exp(kI * (2 * M_PI * m / P[a]) * x);
      }
  }
  double vol = P[0] * P[1] * P[2];
  std::vector<CVec3> cube(std::size_t(M) * M * M, CVec3::Zero());
  for (const auto& [m, F] : modes)
    cube[(m[0] + mmax) + M * ((m[1] + mmax) + std::size_t(M) * (m[2] + mmax))] = F / vol;
  std::size_t N = c.size();
  std::vector<CVec3> vals(N, CVec3::Zero());
  // contract axis 2, then 1, then 0
  std::vector<CVec3> s2(std::size_t(M) * M * c.n[2], CVec3::Zero());
  for (int k = 0; k < c.n[2]; ++k)
    for (int m2 = 0; m2 < M; ++m2)
      for (int m1 = 0; m1 < M; ++m1)
        for (int m0 = 0; m0 < M; ++m0)
          s2[m0 + M * (m1 + std::size_t(M) * k)] += ph[2](k, m2) * cube[m0 + M * (m1 + std::size_t(M) * m2)];
  std::vector<CVec3> s1(std::size_t(M) * c.n[1] * c.n[2], CVec3::Zero());
  for (int k = 0; k < c.n[2]; ++k)
    for (int j = 0; j < c.n[1]; ++j)
      for (int m1 = 0; m1 < M; ++m1)
        for (int m0 = 0; m0 < M; ++m0)
          s1[m0 + M * (j + std::size_t(c.n[1]) * k)] += ph[1](j, m1) * s2[m0 + M * (m1 + std::size_t(M) * k)];
  for (int k = 0; k < c.n[2]; ++k)
    for (int j = 0; j < c.n[1]; ++j)
      for (int i = 0; i < c.n[0]; ++i) {
        CVec3 v = CVec3::Zero();
        for (int m0 = 0; m0 < M; ++m0) v += ph[0](i, m0) * s1[m0 + M * (j + std::size_t(c.n[1]) * k)];
        vals[c.index(i, j, k)] = v;
      }
  CVec3 out_mean = CVec3::Zero();
  std::size_t cnt = 0;
  for (int k = 0; k < c.n[2]; ++k)
    for (int j = 0; j < c.n[1]; ++j)
      for (int i = 0; i < c.n[0]; ++i)
        if (!sc.contains_domain_node(i, j, k)) {
          out_mean += vals[c.index(i, j, k)];
          ++cnt;
        }
  CVec3 shift = cnt ? CVec3(-out_mean / double(cnt)) : CVec3::Zero();
  if (dc) *dc = shift * vol;
  ComplexVectorField f(c);
  for (std::size_t i = 0; i < N; ++i) f[i] = vals[i] + shift;
  return sc.restrict_to_domain(f);
}

std::pair<double, double> curl_div_residual(const FourierChiData& F) {
  double curl = 0, div = 0, scale = 0;
  for (std::size_t i = 0; i < F.xi.size(); ++i) {
    const Vec3& x = F.xi[i];
    const CVec3& f = F.F[i];
    scale = std::max(scale, x.norm() * f.norm());
    for (int j = 0; j < 3; ++j)
      for (int k = j + 1; k < 3; ++k) curl = std::max(curl, std::abs(x(j) * f(k) - x(k) * f(j)));
    div = std::max(div, std::abs(dotu(x.cast<cplx>(), f)));
  }
  if (scale == 0) return {0.0, 0.0};
  return {curl / scale, div / scale};
}

CVec3 node_fourier(const ComplexVectorField& f, const Vec3& xi) {
  const BoxGrid& g = f.grid;
  Vec3 xc = g.center();
  CVec3 s = CVec3::Zero();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (f[i].squaredNorm() > 0)
      s += g.node_weight(i) * std::exp(-kI * xi.dot(g.position(i) - xc)) * f[i];
  return s;
}

double relative_l2(const ComplexVectorField& a, const ComplexVectorField& ref) {
  return (a - ref).l2() / ref.l2();
}

ReconResult reconstruct_from_data(const FourierChiData& data, const MaterialModel& m,
                                  const ComplexVectorField* truth) {
  ReconResult r;
  r.data = data;
  CVec3 dc;
  int missing = 0;
  ComplexVectorField achi = invert_fourier(data, m.grid, &dc, &missing);
  ScalarField a = afactor(m.eps, m.eps0);
  r.chi2 = ComplexVectorField(m.grid);
  for (std::size_t i = 0; i < m.grid.size(); ++i) r.chi2[i] = achi[i] / a[i];
  auto cd = curl_div_residual(data);
  r.report.curl_residual = cd.first;
  r.report.div_residual = cd.second;
  r.report.dc = dc;
  r.report.missing_modes = missing;
  for (double c : data.condition) r.report.max_condition = std::max(r.report.max_condition, c);
  if (truth) r.report.rel_l2_error = relative_l2(r.chi2, *truth);
  return r;
}

ReconResult reconstruct_chi2(const SourceFactory& make_src, const MaterialModel& m, double omega,
                             const std::vector<Vec3>& xi_grid, double tau, const ReconOptions& opts,
                             const ComplexVectorField* truth) {
  FourierChiData d = sample_fourier_data(make_src, m, omega, xi_grid, tau, opts);
  return reconstruct_from_data(d, m, truth);
}

}  // namespace shg
