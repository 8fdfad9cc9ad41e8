#include "shg/linear.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <numeric>
#include <unsupported/Eigen/IterativeSolvers>

namespace shg {

namespace {

double norm2(const CVector& v) {
  double s = 0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

// Wraps the constant-coefficient transform solve as a GMRES preconditioner.
class TransformPreconditioner {
 public:
  using Scalar = cplx;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  TransformPreconditioner() = default;
  template <class M>
  TransformPreconditioner& analyzePattern(const M&) { return *this; }
  template <class M>
  TransformPreconditioner& factorize(const M&) { return *this; }
  template <class M>
  TransformPreconditioner& compute(const M&) { return *this; }
  template <class R>
  Eigen::VectorXcd solve(const Eigen::MatrixBase<R>& b) const {
    CVector in(b.size()), out;
    for (Eigen::Index i = 0; i < b.size(); ++i) in[i] = b(i);
    solver->solve(in, out);
    return Eigen::Map<const Eigen::VectorXcd>(out.data(), Eigen::Index(out.size()));
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

  const ConstantCurlCurlSolver* solver = nullptr;
};

}  // namespace

struct MaxwellSystem::Sparse {
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> A;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>>> lu;
};

MaxwellSystem::MaxwellSystem(const MaterialModel& m, double k, int harmonic,
                             LinearSolverOptions opts)
    : yee_(make_yee(m.grid)), k_(k), opts_(opts) {
  if (!(k > 0)) throw Error(Errc::DegenerateFrequency, "wavenumber must be positive");
  const ScalarField& eps = m.eps_at(harmonic);
  const ScalarField& mu = m.mu_at(harmonic);
  for (const auto* f : {&eps, &mu})
    for (const auto& x : f->v)
      if (!(x.real() > 0)) throw Error(Errc::ConstraintViolated, "eps, mu need positive real part");
  eps_e_ = yee_->scalar_to_edges(eps);
  mu_f_ = yee_->scalar_to_faces(mu);
  inv_mu_f_.resize(mu_f_.size());
  for (std::size_t i = 0; i < mu_f_.size(); ++i) inv_mu_f_[i] = 1.0 / mu_f_[i];
  constant_ = eps.is_constant() && mu.is_constant();
  cplx eref, mref;
  if (constant_) {
    eref = eps[0];
    mref = mu[0];
  } else {
    eref = std::accumulate(eps_e_.begin(), eps_e_.end(), cplx(0)) / double(eps_e_.size());
    mref = std::accumulate(mu_f_.begin(), mu_f_.end(), cplx(0)) / double(mu_f_.size());
  }
  fft_ = std::make_unique<ConstantCurlCurlSolver>(yee_, k, eref, mref);
  if (constant_ && fft_->sigma_min() < opts_.resonance_threshold * fft_->sigma_max())
    throw Error(Errc::ResonantFrequency, "interior curl-curl operator is numerically singular");
}

MaxwellSystem::~MaxwellSystem() = default;

CVector MaxwellSystem::apply(const CVector& e) const {
  CVector f = yee_->curl(e);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= inv_mu_f_[i];
  CVector out = yee_->curl_t(f);
  double k2 = k_ * k_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= k2 * eps_e_[i] * e[i];
  return out;
}

void MaxwellSystem::ensure_matrix() const {
  if (sparse_) return;
  sparse_ = std::make_unique<Sparse>();
  const auto& y = *yee_;
  const BoxGrid& g = y.grid();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(y.nfaces() * 4);
  // curl restricted to interior edge columns
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    const auto& d = y.fdim(a);
    for (int kk = 0; kk < d[2]; ++kk)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> p{i, j, kk}, pb = p, pc = p;
          pb[b] += 1;
          pc[c] += 1;
          long row = long(y.fidx(a, i, j, kk));
          auto put = [&](std::size_t e, double v) {
            long s = y.interior_slot(e);
            if (s >= 0) trip.emplace_back(int(row), int(s), v);
          };
          put(y.eidx(c, pb[0], pb[1], pb[2]), 1.0 / g.h[b]);
          put(y.eidx(c, i, j, kk), -1.0 / g.h[b]);
          put(y.eidx(b, pc[0], pc[1], pc[2]), -1.0 / g.h[c]);
          put(y.eidx(b, i, j, kk), 1.0 / g.h[c]);
        }
  }
  long ni = long(y.interior().size());
  Eigen::SparseMatrix<cplx> C(long(y.nfaces()), ni);
  C.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<cplx> D(long(y.nfaces()), long(y.nfaces()));
  D.reserve(Eigen::VectorXi::Constant(long(y.nfaces()), 1));
  for (std::size_t i = 0; i < y.nfaces(); ++i) D.insert(long(i), long(i)) = inv_mu_f_[i];
  Eigen::SparseMatrix<cplx> M(ni, ni);
  M.reserve(Eigen::VectorXi::Constant(ni, 1));
  for (long s = 0; s < ni; ++s) M.insert(s, s) = k_ * k_ * eps_e_[y.interior()[s]];
  Eigen::SparseMatrix<cplx> K = Eigen::SparseMatrix<cplx>(C.transpose()) * D * C;
  K -= M;
  sparse_->A = K;
}

int MaxwellSystem::solve_interior(const CVector& b, CVector& x, std::string* method) const {
  if (constant_) {
    fft_->solve(b, x);
    if (method) *method = "transform";
    return 1;
  }
  ensure_matrix();
  const auto& A = sparse_->A;
  Eigen::Map<const Eigen::VectorXcd> bv(b.data(), Eigen::Index(b.size()));
  double bn = bv.norm();
  x.assign(b.size(), 0.0);
  if (bn == 0) {
    if (method) *method = "trivial";
    return 0;
  }
  if (!sparse_->lu) {
    Eigen::GMRES<Eigen::SparseMatrix<cplx, Eigen::RowMajor>, TransformPreconditioner> gm;
    gm.preconditioner().solver = fft_.get();
    gm.set_restart(opts_.restart);
    gm.setMaxIterations(opts_.max_iter);
    gm.setTolerance(opts_.tol * 0.1);
    gm.compute(A);
    Eigen::VectorXcd xv = Eigen::VectorXcd::Zero(bv.size());
    int iters = 0;
    for (int round = 0; round < 4; ++round) {
      xv = gm.solveWithGuess(bv, xv);
      iters += int(gm.iterations());
      double rel = (A * xv - bv).norm() / bn;
      if (rel <= opts_.tol) {
        for (Eigen::Index i = 0; i < xv.size(); ++i) x[i] = xv(i);
        if (method) *method = "gmres";
        return iters;
      }
      if (gm.info() == Eigen::NumericalIssue) break;
    }
    const auto& n = yee_->grid().n;
    if (std::max({n[0], n[1], n[2]}) > opts_.direct_cutoff)
      throw Error(Errc::SolveFailed, "preconditioned GMRES stagnated");
    sparse_->lu = std::make_unique<
        Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>>>();
    Eigen::SparseMatrix<cplx> Ac = A;
    sparse_->lu->compute(Ac);
    if (sparse_->lu->info() != Eigen::Success)
      throw Error(Errc::ResonantFrequency, "sparse factorization failed (singular system)");
  }
  Eigen::VectorXcd xv = sparse_->lu->solve(bv);
  for (Eigen::Index i = 0; i < xv.size(); ++i) x[i] = xv(i);
  if (method) *method = "sparse-lu";
  return 1;
}

CVector MaxwellSystem::interior_rhs(const CVector& boundary_e, const CVector* je,
                                    const CVector* jm) const {
  const auto& y = *yee_;
  CVector eb(y.nedges(), 0.0);
  for (std::size_t e : y.boundary()) eb[e] = boundary_e[e];
  CVector full = apply(eb);
  for (auto& v : full) v = -v;
  if (je)
    for (std::size_t e : y.interior()) full[e] += kI * k_ * (*je)[e];
  if (jm) {
    CVector f(y.nfaces());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = (*jm)[i] * inv_mu_f_[i];
    CVector ct = y.curl_t(f);
    for (std::size_t e : y.interior()) full[e] += ct[e];
  }
  CVector b(y.interior().size());
  for (std::size_t s = 0; s < b.size(); ++s) b[s] = full[y.interior()[s]];
  return b;
}

double MaxwellSystem::relative_residual(const YeeSolution& s, const CVector* je,
                                        const CVector* jm) const {
  CVector b = interior_rhs(s.e, je, jm);
  CVector ke = apply(s.e);
  const auto& y = *yee_;
  // (K e)_int - src_int = (K x)_int - b, with src = b + (K e_b)_int
  CVector eb(y.nedges(), 0.0);
  for (std::size_t e : y.boundary()) eb[e] = s.e[e];
  CVector kb = apply(eb);
  double rn = 0, bn = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::size_t e = y.interior()[i];
    cplx r = (ke[e] - kb[e]) - b[i];
    rn += std::norm(r);
    bn += std::norm(b[i]);
  }
  return bn > 0 ? std::sqrt(rn / bn) : std::sqrt(rn);
}

LinearSolution MaxwellSystem::solve_edges(const CVector& boundary_e, const CVector* je,
                                          const CVector* jm) const {
  const auto& y = *yee_;
  LinearSolution out;
  CVector b = interior_rhs(boundary_e, je, jm);
  CVector x;
  out.report.iterations = solve_interior(b, x, &out.report.method);
  out.yee.e.assign(y.nedges(), 0.0);
  for (std::size_t e : y.boundary()) out.yee.e[e] = boundary_e[e];
  for (std::size_t s = 0; s < x.size(); ++s) out.yee.e[y.interior()[s]] = x[s];
  out.yee.h = y.curl(out.yee.e);
  cplx ik = kI * k_;
  for (std::size_t i = 0; i < out.yee.h.size(); ++i) {
    cplx v = out.yee.h[i];
    if (jm) v -= (*jm)[i];
    out.yee.h[i] = v / (ik * mu_f_[i]);
  }
  out.report.relative_residual = relative_residual(out.yee, je, jm);
  if (!(out.report.relative_residual <= std::max(opts_.tol, 1e-9)))
    throw Error(Errc::SolveFailed, "linear solve residual above tolerance");
  auto sv = singular_value_estimates();
  out.report.condition_estimate = sv.first > 0 ? sv.second / sv.first : INFINITY;
  out.report.resonance = sv.first < opts_.resonance_threshold * sv.second;
  out.E = y.edges_to_nodes(out.yee.e);
  out.H = y.faces_to_nodes(out.yee.h);
  return out;
}

std::pair<double, double> MaxwellSystem::singular_value_estimates() const {
  // exact for constant coefficients; the reference operator otherwise
  return {fft_->sigma_min(), fft_->sigma_max()};
}

LinearSolution MaxwellSystem::solve_bvp(const TangentialTrace& f) const {
  if (!f.grid.same_as(yee_->grid())) throw Error(Errc::InvalidGrid, "trace grid mismatch");
  CVector eb = yee_->trace_to_edges(f);
  LinearSolution s = solve_edges(eb, nullptr, nullptr);
  double fn = f.l2();
  s.report.stability_constant = fn > 0 ? (s.E.l2() + s.H.l2()) / fn : 0.0;
  return s;
}

LinearSolution MaxwellSystem::solve_sources(const ComplexVectorField& Je,
                                            const ComplexVectorField* Jm) const {
  if (!Je.grid.same_as(yee_->grid())) throw Error(Errc::InvalidGrid, "source grid mismatch");
  CVector je = yee_->nodes_to_edges(Je);
  CVector jm;
  if (Jm) jm = yee_->nodes_to_faces(*Jm);
  CVector eb(yee_->nedges(), 0.0);
  LinearSolution s = solve_edges(eb, &je, Jm ? &jm : nullptr);
  double jn = Je.l2() + (Jm ? Jm->l2() : 0.0);
  s.report.stability_constant = jn > 0 ? (s.E.l2() + s.H.l2()) / jn : 0.0;
  return s;
}

LinearSolution solve_linear_bvp(const MaterialModel& m, double k_omega, const TangentialTrace& f,
                                int harmonic, const LinearSolverOptions& opts) {
  return MaxwellSystem(m, k_omega, harmonic, opts).solve_bvp(f);
}

LinearSolution solve_linear_sources(const MaterialModel& m, double k_omega,
                                    const ComplexVectorField& Je, const ComplexVectorField* Jm,
                                    int harmonic, const LinearSolverOptions& opts) {
  return MaxwellSystem(m, k_omega, harmonic, opts).solve_sources(Je, Jm);
}

ResonanceCheck detect_resonance(const MaterialModel& m, double omega, double threshold,
                                int harmonic) {
  ResonanceCheck rc;
  LinearSolverOptions opts;
  opts.resonance_threshold = 0;  // never throw here
  double k = omega * harmonic;
  MaxwellSystem sys(m, k, harmonic, opts);
  if (sys.constant_coefficients()) {
    auto sv = sys.singular_value_estimates();
    rc.sigma_min = sv.first;
    rc.sigma_max = sv.second;
  } else {
    const auto& y = *sys.yee();
    std::size_t ni = y.interior().size();
    auto apply_int = [&](const CVector& x) {
      CVector full(y.nedges(), 0.0);
      for (std::size_t s = 0; s < ni; ++s) full[y.interior()[s]] = x[s];
      CVector r = sys.apply(full);
      CVector out(ni);
      for (std::size_t s = 0; s < ni; ++s) out[s] = r[y.interior()[s]];
      return out;
    };
    auto conjv = [](CVector v) {
      for (auto& x : v) x = std::conj(x);
      return v;
    };
    // deterministic start vector
    CVector x(ni);
    for (std::size_t s = 0; s < ni; ++s) x[s] = cplx(std::sin(1.0 + s), std::cos(2.0 + 3.0 * s));
    double nx = norm2(x);
    for (auto& v : x) v /= nx;
    // largest: power iteration on K^H K, K^H = conj(K conj(.)) since K^T = K
    CVector y1 = x;
    double smax = 0;
    for (int it = 0; it < 30; ++it) {
      CVector z = conjv(apply_int(conjv(apply_int(y1))));
      double nz = norm2(z);
      smax = std::sqrt(nz);
      for (auto& v : z) v /= nz;
      y1 = z;
    }
    double smin = 0;
    try {
      CVector y2 = x;
      for (int it = 0; it < 12; ++it) {
        CVector t, z;
        sys.solve_interior(conjv(y2), t);
        sys.solve_interior(conjv(t), z);
        double nz = norm2(z);
        smin = 1.0 / std::sqrt(nz);
        for (auto& v : z) v /= nz;
        y2 = z;
      }
    } catch (const Error&) {
      smin = 0;
    }
    rc.sigma_min = smin;
    rc.sigma_max = smax;
  }
  rc.condition_estimate = rc.sigma_min > 0 ? rc.sigma_max / rc.sigma_min : INFINITY;
  rc.flag = rc.sigma_min < threshold * rc.sigma_max;
  return rc;
}

TangentialTrace magnetic_trace(const MaxwellSystem& sys, const YeeSolution& s, const CVector* je) {
  const YeeGrid& y = *sys.yee();
  const BoxGrid& g = y.grid();
  TangentialTrace t(g);
  std::array<std::vector<CVec3>, 6> coef;
  for (int f = 0; f < 6; ++f) coef[f].assign(t.faces[f].size(), CVec3::Zero());
  cplx ik = kI * sys.k();
  const auto& eps = sys.eps_edges();
  auto add = [&](int f, int a, std::array<int, 3> p, cplx val) {
    auto fi = t.face(f);
    for (int sgn = 0; sgn < 2; ++sgn) {
      std::array<int, 3> q = p;
      q[a] += sgn;
      coef[f][q[fi.u] + std::size_t(fi.nu_count) * q[fi.v]](a) += 0.5 * val;
    }
  };
  for (std::size_t e : y.boundary()) {
    int a = e < y.eoff(1) ? 0 : (e < y.eoff(2) ? 1 : 2);
    int b = (a + 1) % 3, c = (a + 2) % 3;
    auto p = y.eunindex(a, e - y.eoff(a));
    int nb = g.n[b], nc = g.n[c];
    // H_c at half index j along b, H_b at half index j along c; zero outside
    auto Hc = [&](int j) -> cplx {
      if (j < 0 || j > nb - 2) return 0.0;
      std::array<int, 3> q = p;
      q[b] = j;
      return s.h[y.fidx(c, q[0], q[1], q[2])];
    };
    auto Hb = [&](int j) -> cplx {
      if (j < 0 || j > nc - 2) return 0.0;
      std::array<int, 3> q = p;
      q[c] = j;
      return s.h[y.fidx(b, q[0], q[1], q[2])];
    };
    double hb = g.h[b], hc = g.h[c], ha = g.h[a];
    cplx termb = (Hc(p[b]) - Hc(p[b] - 1)) / hb;
    cplx termc = -(Hb(p[c]) - Hb(p[c] - 1)) / hc;
    bool onb = p[b] == 0 || p[b] == nb - 1;
    bool onc = p[c] == 0 || p[c] == nc - 1;
    cplx rhs = -ik * eps[e] * s.e[e];
    if (je) rhs += (*je)[e];
    if (onc) {
      int f = 2 * c + (p[c] == 0 ? 0 : 1);
      if (onb) {
        cplx N = p[c] == 0 ? (3.0 * Hb(0) - Hb(1)) / 2.0 : -(3.0 * Hb(nc - 2) - Hb(nc - 3)) / 2.0;
        add(f, a, p, 0.5 * ha * hb * N);
      } else {
        cplx N = -hc * (termb + termc) + 0.5 * hc * (rhs + termb);
        add(f, a, p, ha * hb * N);
      }
    }
    if (onb) {
      int f = 2 * b + (p[b] == 0 ? 0 : 1);
      if (onc) {
        cplx N = p[b] == 0 ? -(3.0 * Hc(0) - Hc(1)) / 2.0 : (3.0 * Hc(nb - 2) - Hc(nb - 3)) / 2.0;
        add(f, a, p, 0.5 * ha * hc * N);
      } else {
        cplx N = -hb * (termb + termc) + 0.5 * hb * (rhs + termc);
        add(f, a, p, ha * hc * N);
      }
    }
  }
  for (int f = 0; f < 6; ++f) {
    auto fi = t.face(f);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        std::size_t i = iu + std::size_t(fi.nu_count) * iv;
        t.faces[f][i] = coef[f][i] / t.area_weight(f, iu, iv);
        t.faces[f][i](fi.axis) = 0.0;
      }
  }
  return t;
}

}  // namespace shg
