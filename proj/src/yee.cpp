#include "shg/yee.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "shg/fft.hpp"

namespace shg {

namespace {

std::size_t lin(const std::array<int, 3>& d, int i, int j, int k) {
  return i + std::size_t(d[0]) * (j + std::size_t(d[1]) * k);
}

// Maps values on half points along `axis` to nodes: two-point average inside,
// quadratic extrapolation from the three nearest half points at the ends.
CVector half_to_node(const CVector& in, std::array<int, 3> d, int axis) {
  std::array<int, 3> o = d;
  o[axis] += 1;
  CVector out(std::size_t(o[0]) * o[1] * o[2]);
  int N = d[axis];
  for (int k = 0; k < o[2]; ++k)
    for (int j = 0; j < o[1]; ++j)
      for (int i = 0; i < o[0]; ++i) {
        std::array<int, 3> p{i, j, k};
        int q = p[axis];
        auto at = [&](int s) {
          std::array<int, 3> r = p;
          r[axis] = s;
          return in[lin(d, r[0], r[1], r[2])];
        };
        cplx val;
        if (q == 0)
          val = (15.0 * at(0) - 10.0 * at(1) + 3.0 * at(2)) / 8.0;
        else if (q == N)
          val = (15.0 * at(N - 1) - 10.0 * at(N - 2) + 3.0 * at(N - 3)) / 8.0;
        else
          val = 0.5 * (at(q - 1) + at(q));
        out[lin(o, i, j, k)] = val;
      }
  return out;
}

}  // namespace

YeeGrid::YeeGrid(const BoxGrid& g) : g_(g) {
  g.validate();
  eoff_[0] = foff_[0] = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      edim_[a][b] = b == a ? g.n[b] - 1 : g.n[b];
      fdim_[a][b] = b == a ? g.n[b] : g.n[b] - 1;
    }
    eoff_[a + 1] = eoff_[a] + std::size_t(edim_[a][0]) * edim_[a][1] * edim_[a][2];
    foff_[a + 1] = foff_[a] + std::size_t(fdim_[a][0]) * fdim_[a][1] * fdim_[a][2];
  }
  islot_.assign(nedges(), -1);
  for (int a = 0; a < 3; ++a) {
    const auto& d = edim_[a];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::size_t e = eidx(a, i, j, k);
          if (boundary_edge(a, {i, j, k})) {
            boundary_.push_back(e);
          } else {
            islot_[e] = long(interior_.size());
            interior_.push_back(e);
          }
        }
  }
}

YeeGridPtr make_yee(const BoxGrid& g) { return std::make_shared<const YeeGrid>(g); }

std::array<int, 3> YeeGrid::eunindex(int a, std::size_t local) const {
  const auto& d = edim_[a];
  int i = int(local % d[0]);
  local /= d[0];
  int j = int(local % d[1]);
  int k = int(local / d[1]);
  return {i, j, k};
}

Vec3 YeeGrid::epos(int a, int i, int j, int k) const {
  Vec3 x = g_.position(i, j, k);
  x(a) += 0.5 * g_.h[a];
  return x;
}

Vec3 YeeGrid::fpos(int a, int i, int j, int k) const {
  Vec3 x = g_.position(i, j, k);
  for (int b = 0; b < 3; ++b)
    if (b != a) x(b) += 0.5 * g_.h[b];
  return x;
}

bool YeeGrid::boundary_edge(int a, const std::array<int, 3>& p) const {
  for (int b = 0; b < 3; ++b)
    if (b != a && (p[b] == 0 || p[b] == g_.n[b] - 1)) return true;
  return false;
}

void YeeGrid::curl(const cplx* e, cplx* f) const {
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    const auto& d = fdim_[a];
    double ib = 1.0 / g_.h[b], ic = 1.0 / g_.h[c];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> p{i, j, k}, pb = p, pc = p;
          pb[b] += 1;
          pc[c] += 1;
          cplx v = (e[eidx(c, pb[0], pb[1], pb[2])] - e[eidx(c, i, j, k)]) * ib -
                   (e[eidx(b, pc[0], pc[1], pc[2])] - e[eidx(b, i, j, k)]) * ic;
          f[fidx(a, i, j, k)] = v;
        }
  }
}

void YeeGrid::curl_t(const cplx* f, cplx* e) const {
  std::fill(e, e + nedges(), cplx(0));
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    const auto& d = fdim_[a];
    double ib = 1.0 / g_.h[b], ic = 1.0 / g_.h[c];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> p{i, j, k}, pb = p, pc = p;
          pb[b] += 1;
          pc[c] += 1;
          cplx v = f[fidx(a, i, j, k)];
          e[eidx(c, pb[0], pb[1], pb[2])] += v * ib;
          e[eidx(c, i, j, k)] -= v * ib;
          e[eidx(b, pc[0], pc[1], pc[2])] -= v * ic;
          e[eidx(b, i, j, k)] += v * ic;
        }
  }
}

CVector YeeGrid::curl(const CVector& e) const {
  CVector f(nfaces());
  curl(e.data(), f.data());
  return f;
}

CVector YeeGrid::curl_t(const CVector& f) const {
  CVector e(nedges());
  curl_t(f.data(), e.data());
  return e;
}

CVector YeeGrid::nodes_to_edges(const ComplexVectorField& u) const {
  CVector e(nedges());
  for (int a = 0; a < 3; ++a) {
    const auto& d = edim_[a];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> q{i, j, k};
          q[a] += 1;
          e[eidx(a, i, j, k)] = 0.5 * (u[g_.index(i, j, k)](a) + u[g_.index(q[0], q[1], q[2])](a));
        }
  }
  return e;
}

ComplexVectorField YeeGrid::edges_to_nodes(const CVector& e) const {
  ComplexVectorField u(g_);
  for (int a = 0; a < 3; ++a) {
    CVector block(e.begin() + eoff_[a], e.begin() + eoff_[a + 1]);
    CVector nodes = half_to_node(block, edim_[a], a);
    for (std::size_t i = 0; i < nodes.size(); ++i) u[i](a) = nodes[i];
  }
  return u;
}

ComplexVectorField YeeGrid::faces_to_nodes(const CVector& f) const {
  ComplexVectorField u(g_);
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    CVector block(f.begin() + foff_[a], f.begin() + foff_[a + 1]);
    std::array<int, 3> d = fdim_[a];
    CVector step = half_to_node(block, d, b);
    d[b] += 1;
    CVector nodes = half_to_node(step, d, c);
    for (std::size_t i = 0; i < nodes.size(); ++i) u[i](a) = nodes[i];
  }
  return u;
}

CVector YeeGrid::nodes_to_faces(const ComplexVectorField& u) const {
  CVector f(nfaces());
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    const auto& d = fdim_[a];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> p{i, j, k};
          cplx s = 0;
          for (int db = 0; db < 2; ++db)
            for (int dc = 0; dc < 2; ++dc) {
              std::array<int, 3> q = p;
              q[b] += db;
              q[c] += dc;
              s += u[g_.index(q[0], q[1], q[2])](a);
            }
          f[fidx(a, i, j, k)] = 0.25 * s;
        }
  }
  return f;
}

CVector YeeGrid::scalar_to_edges(const ScalarField& s) const {
  CVector e(nedges());
  for (int a = 0; a < 3; ++a) {
    const auto& d = edim_[a];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> q{i, j, k};
          q[a] += 1;
          e[eidx(a, i, j, k)] = 0.5 * (s[g_.index(i, j, k)] + s[g_.index(q[0], q[1], q[2])]);
        }
  }
  return e;
}

CVector YeeGrid::scalar_to_faces(const ScalarField& s) const {
  CVector f(nfaces());
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    const auto& d = fdim_[a];
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> p{i, j, k};
          cplx v = 0;
          for (int db = 0; db < 2; ++db)
            for (int dc = 0; dc < 2; ++dc) {
              std::array<int, 3> q = p;
              q[b] += db;
              q[c] += dc;
              v += s[g_.index(q[0], q[1], q[2])];
            }
          f[fidx(a, i, j, k)] = 0.25 * v;
        }
  }
  return f;
}

CVector YeeGrid::trace_to_edges(const TangentialTrace& t) const {
  CVector e(nedges(), 0.0);
  auto tan = t.tangential_part();
  for (std::size_t e_id : boundary_) {
    int a = e_id < eoff_[1] ? 0 : (e_id < eoff_[2] ? 1 : 2);
    auto p = eunindex(a, e_id - eoff_[a]);
    cplx sum = 0;
    int cnt = 0;
    for (int b = 0; b < 3; ++b) {
      if (b == a || (p[b] != 0 && p[b] != g_.n[b] - 1)) continue;
      int f = 2 * b + (p[b] == 0 ? 0 : 1);
      auto fi = t.face(f);
      for (int s = 0; s < 2; ++s) {
        std::array<int, 3> q = p;
        q[a] += s;
        sum += 0.5 * tan[f][q[fi.u] + std::size_t(fi.nu_count) * q[fi.v]](a);
      }
      ++cnt;
    }
    e[e_id] = sum / double(cnt);
  }
  return e;
}

// ---------------------------------------------------------------------------

struct ConstantCurlCurlSolver::Impl {
  YeeGridPtr yee;
  double k;
  cplx eps, mu;
  std::array<std::array<int, 3>, 3> dims;   // transform array dims per component
  std::array<std::vector<long>, 3> slots;   // array position -> interior slot
  std::array<std::vector<double>, 3> s;     // 1D symbols per axis
  std::array<double*, 3> re{}, im{};
  std::array<fftw_plan, 3> fwd{}, inv{};
  double scale = 1;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    for (int a = 0; a < 3; ++a) {
      if (fwd[a]) fftw_destroy_plan(fwd[a]);
      if (inv[a]) fftw_destroy_plan(inv[a]);
      fftw_free(re[a]);
      fftw_free(im[a]);
    }
  }
};

ConstantCurlCurlSolver::ConstantCurlCurlSolver(YeeGridPtr yee, double k, cplx eps, cplx mu)
    : impl_(std::make_unique<Impl>()) {
  auto& m = *impl_;
  m.yee = yee;
  m.k = k;
  m.eps = eps;
  m.mu = mu;
  const BoxGrid& g = yee->grid();
  std::array<int, 3> N{g.n[0] - 1, g.n[1] - 1, g.n[2] - 1};
  m.scale = 1.0 / (8.0 * N[0] * N[1] * N[2]);
  for (int a = 0; a < 3; ++a) {
    m.s[a].resize(N[a]);
    for (int p = 0; p < N[a]; ++p) m.s[a][p] = 2.0 / g.h[a] * std::sin(M_PI * p / (2.0 * N[a]));
  }
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  for (int a = 0; a < 3; ++a) {
    auto& d = m.dims[a];
    for (int b = 0; b < 3; ++b) d[b] = b == a ? N[b] : N[b] - 1;
    std::size_t sz = std::size_t(d[0]) * d[1] * d[2];
    m.re[a] = static_cast<double*>(fftw_malloc(sizeof(double) * sz));
    m.im[a] = static_cast<double*>(fftw_malloc(sizeof(double) * sz));
    m.slots[a].resize(sz);
    for (int kk = 0; kk < d[2]; ++kk)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          std::array<int, 3> p{i, j, kk};
          for (int b = 0; b < 3; ++b)
            if (b != a) p[b] += 1;
          m.slots[a][lin(d, i, j, kk)] = yee->interior_slot(yee->eidx(a, p[0], p[1], p[2]));
        }
    fftw_r2r_kind kf[3], ki[3];
    for (int b = 0; b < 3; ++b) {
      // FFTW is row-major, our arrays are x-fastest: reverse the axis order
      kf[2 - b] = b == a ? FFTW_REDFT10 : FFTW_RODFT00;
      ki[2 - b] = b == a ? FFTW_REDFT01 : FFTW_RODFT00;
    }
    m.fwd[a] = fftw_plan_r2r_3d(d[2], d[1], d[0], m.re[a], m.re[a], kf[0], kf[1], kf[2],
                                FFTW_ESTIMATE);
    m.inv[a] = fftw_plan_r2r_3d(d[2], d[1], d[0], m.re[a], m.re[a], ki[0], ki[1], ki[2],
                                FFTW_ESTIMATE);
  }
  // extreme eigenvalues of the (normal) symbol
  cplx k2e = k * k * eps;
  smin_ = INFINITY;
  smax_ = 0;
  auto upd = [&](cplx lam) {
    smin_ = std::min(smin_, std::abs(lam));
    smax_ = std::max(smax_, std::abs(lam));
  };
  for (int p2 = 0; p2 < N[2]; ++p2)
    for (int p1 = 0; p1 < N[1]; ++p1)
      for (int p0 = 0; p0 < N[0]; ++p0) {
        int zeros = (p0 == 0) + (p1 == 0) + (p2 == 0);
        if (zeros > 1) continue;
        double ss = m.s[0][p0] * m.s[0][p0] + m.s[1][p1] * m.s[1][p1] + m.s[2][p2] * m.s[2][p2];
        upd(ss / mu - k2e);
        if (zeros == 0) upd(-k2e);
      }
}

ConstantCurlCurlSolver::~ConstantCurlCurlSolver() = default;

void ConstantCurlCurlSolver::solve(const CVector& r, CVector& x) const {
  auto& m = *impl_;
  x.assign(r.size(), 0.0);
  for (int a = 0; a < 3; ++a) {
    std::size_t sz = m.slots[a].size();
    for (std::size_t i = 0; i < sz; ++i) {
      cplx v = r[m.slots[a][i]];
      m.re[a][i] = v.real();
      m.im[a][i] = v.imag();
    }
    fftw_execute_r2r(m.fwd[a], m.re[a], m.re[a]);
    fftw_execute_r2r(m.fwd[a], m.im[a], m.im[a]);
  }
  const auto& d = m.dims;
  std::array<int, 3> N{d[0][0], d[1][1], d[2][2]};
  cplx k2e = m.k * m.k * m.eps;
  for (int p2 = 0; p2 < N[2]; ++p2)
    for (int p1 = 0; p1 < N[1]; ++p1)
      for (int p0 = 0; p0 < N[0]; ++p0) {
        std::array<int, 3> p{p0, p1, p2};
        int zeros = (p0 == 0) + (p1 == 0) + (p2 == 0);
        if (zeros > 1) continue;
        Vec3 sv(m.s[0][p0], m.s[1][p1], m.s[2][p2]);
        double ss = sv.squaredNorm();
        cplx alpha = ss / m.mu - k2e;
        if (zeros == 1) {
          int a = p0 == 0 ? 0 : (p1 == 0 ? 1 : 2);
          std::size_t i = lin(d[a], p[0] - (a != 0), p[1] - (a != 1), p[2] - (a != 2));
          cplx v(m.re[a][i], m.im[a][i]);
          v /= alpha;
          m.re[a][i] = v.real();
          m.im[a][i] = v.imag();
          continue;
        }
        cplx beta = -k2e;
        std::array<std::size_t, 3> idx;
        CVec3 rv;
        for (int a = 0; a < 3; ++a) {
          idx[a] = lin(d[a], p[0] - (a != 0), p[1] - (a != 1), p[2] - (a != 2));
          rv(a) = cplx(m.re[a][idx[a]], m.im[a][idx[a]]);
        }
        cplx sr = sv(0) * rv(0) + sv(1) * rv(1) + sv(2) * rv(2);
        CVec3 par = sv.cast<cplx>() * (sr / ss);
        CVec3 out = (rv - par) / alpha + par / beta;
        for (int a = 0; a < 3; ++a) {
          m.re[a][idx[a]] = out(a).real();
          m.im[a][idx[a]] = out(a).imag();
        }
      }
  for (int a = 0; a < 3; ++a) {
    fftw_execute_r2r(m.inv[a], m.re[a], m.re[a]);
    fftw_execute_r2r(m.inv[a], m.im[a], m.im[a]);
    std::size_t sz = m.slots[a].size();
    for (std::size_t i = 0; i < sz; ++i)
      x[m.slots[a][i]] = cplx(m.re[a][i], m.im[a][i]) * m.scale;
  }
}

}  // namespace shg
