#include "shg/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shg {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::ConstraintViolated: return "ConstraintViolated";
    case Errc::IllConditionedSymbol: return "IllConditionedSymbol";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::DegenerateFrequency: return "DegenerateFrequency";
    case Errc::ResonantFrequency: return "ResonantFrequency";
    case Errc::SolveFailed: return "SolveFailed";
    case Errc::SmallnessViolated: return "SmallnessViolated";
    case Errc::ContractionFailed: return "ContractionFailed";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ExtrapolationUnreliable: return "ExtrapolationUnreliable";
    case Errc::InvalidTau: return "InvalidTau";
    case Errc::InvalidXi: return "InvalidXi";
    case Errc::BranchError: return "BranchError";
    case Errc::NeumannDiverged: return "NeumannDiverged";
    case Errc::IllPosedDirections: return "IllPosedDirections";
    case Errc::TauNotAsymptotic: return "TauNotAsymptotic";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

BoxGrid BoxGrid::make(std::array<double, 3> origin, std::array<double, 3> extent,
                      std::array<int, 3> n) {
  BoxGrid g;
  g.origin = origin;
  g.extent = extent;
  g.n = n;
  for (int a = 0; a < 3; ++a) g.h[a] = n[a] > 1 ? extent[a] / (n[a] - 1) : 0.0;
  g.validate();
  return g;
}

BoxGrid BoxGrid::cube(int n, double side, bool centered) {
  double o = centered ? -side / 2 : 0.0;
  return make({o, o, o}, {side, side, side}, {n, n, n});
}

void BoxGrid::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 4) {
      std::ostringstream s;
      s << "axis " << a << " has " << n[a] << " nodes, need at least 4";
      throw Error(Errc::InvalidGrid, s.str());
    }
    if (!(extent[a] > 0) || !(h[a] > 0) || !std::isfinite(extent[a]))
      throw Error(Errc::InvalidGrid, "nonpositive extent on axis " + std::to_string(a));
  }
}

bool BoxGrid::same_as(const BoxGrid& o) const {
  for (int a = 0; a < 3; ++a) {
    if (n[a] != o.n[a]) return false;
    double tol = 1e-12 * std::max(1.0, std::abs(extent[a]));
    if (std::abs(origin[a] - o.origin[a]) > tol || std::abs(extent[a] - o.extent[a]) > tol)
      return false;
  }
  return true;
}

std::array<int, 3> BoxGrid::unindex(std::size_t idx) const {
  int i = int(idx % n[0]);
  idx /= n[0];
  int j = int(idx % n[1]);
  int k = int(idx / n[1]);
  return {i, j, k};
}

int BoxGrid::depth(int i, int j, int k) const {
  int d = std::min({i, j, k});
  d = std::min({d, n[0] - 1 - i, n[1] - 1 - j, n[2] - 1 - k});
  return d;
}

double BoxGrid::node_weight(std::size_t idx) const {
  auto p = unindex(idx);
  double w = 1.0;
  for (int a = 0; a < 3; ++a) {
    w *= h[a];
    if (p[a] == 0 || p[a] == n[a] - 1) w *= 0.5;
  }
  return w;
}

bool ScalarField::is_constant(double rtol) const {
  if (v.empty()) return true;
  double scale = std::abs(v[0]);
  for (const auto& x : v)
    if (std::abs(x - v[0]) > rtol * scale) return false;
  return true;
}

ComplexVectorField& ComplexVectorField::operator+=(const ComplexVectorField& o) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
  return *this;
}
ComplexVectorField& ComplexVectorField::operator-=(const ComplexVectorField& o) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
  return *this;
}
ComplexVectorField& ComplexVectorField::operator*=(cplx s) {
  for (auto& x : v) x *= s;
  return *this;
}
bool ComplexVectorField::all_finite() const {
  for (const auto& x : v)
    for (int c = 0; c < 3; ++c)
      if (!std::isfinite(x(c).real()) || !std::isfinite(x(c).imag())) return false;
  return true;
}
double ComplexVectorField::max_abs() const {
  double m = 0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}
double ComplexVectorField::l2() const {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += grid.node_weight(i) * v[i].squaredNorm();
  return std::sqrt(s);
}

ComplexVectorField operator+(ComplexVectorField a, const ComplexVectorField& b) { return a += b; }
ComplexVectorField operator-(ComplexVectorField a, const ComplexVectorField& b) { return a -= b; }
ComplexVectorField operator*(cplx s, ComplexVectorField a) { return a *= s; }

MaterialModel MaterialModel::vacuum(const BoxGrid& g, double eps0, double mu0) {
  MaterialModel m;
  m.grid = g;
  m.eps0 = eps0;
  m.mu0 = mu0;
  m.eps = ScalarField(g, eps0);
  m.mu = ScalarField(g, mu0);
  m.chi2 = ComplexVectorField(g);
  return m;
}

MaterialModel MaterialModel::conjugate() const {
  MaterialModel m = *this;
  auto cj = [](ScalarField& f) {
    for (auto& x : f.v) x = std::conj(x);
  };
  cj(m.eps);
  cj(m.mu);
  if (m.eps_2w) cj(*m.eps_2w);
  if (m.mu_2w) cj(*m.mu_2w);
  return m;
}

bool MaterialModel::has_chi2() const {
  for (const auto& x : chi2.v)
    if (x.squaredNorm() > 0) return true;
  return false;
}

void MaterialModel::validate() const {
  grid.validate();
  auto check = [&](const ScalarField& f, const char* name) {
    if (f.v.size() != grid.size())
      throw Error(Errc::ConstraintViolated, std::string(name) + " has wrong size");
    for (const auto& x : f.v)
      if (!(x.real() > 0) || !std::isfinite(x.imag()))
        throw Error(Errc::ConstraintViolated, std::string(name) + " needs positive real part");
  };
  check(eps, "eps");
  check(mu, "mu");
  if (eps_2w) check(*eps_2w, "eps_2w");
  if (mu_2w) check(*mu_2w, "mu_2w");
  if (!(eps0 > 0) || !(mu0 > 0))
    throw Error(Errc::ConstraintViolated, "background constants must be positive");
  if (chi2.v.size() != grid.size())
    throw Error(Errc::ConstraintViolated, "chi2 has wrong size");
  double cmax = chi2.max_abs();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto p = grid.unindex(i);
    if (grid.depth(p[0], p[1], p[2]) <= 1 && chi2[i].norm() > 1e-14 * std::max(cmax, 1e-300) &&
        chi2[i].norm() > 0)
      throw Error(Errc::ConstraintViolated, "chi2 must vanish within one node of the boundary");
  }
}

FrequencyPair FrequencyPair::make(double omega, double eps0, double mu0) {
  if (!(omega > 0)) throw Error(Errc::DegenerateFrequency, "omega must be positive");
  return FrequencyPair{omega, omega * std::sqrt(mu0 * eps0)};
}

NormExponent NormExponent::make(double p, double delta) {
  if (!(p > 3 && p < 6)) throw Error(Errc::ConstraintViolated, "norm exponent p must lie in (3,6)");
  if (!(delta > 0.5 && delta < 1)) throw Error(Errc::ConstraintViolated, "delta must lie in (1/2,1)");
  return NormExponent{p, delta};
}

FaceInfo TangentialTrace::face_info(const BoxGrid& g, int f) {
  FaceInfo fi;
  fi.axis = f / 2;
  fi.side = f % 2;
  fi.u = fi.axis == 0 ? 1 : 0;
  fi.v = fi.axis == 2 ? 1 : 2;
  fi.nu_count = g.n[fi.u];
  fi.nv_count = g.n[fi.v];
  fi.hu = g.h[fi.u];
  fi.hv = g.h[fi.v];
  fi.normal = Vec3::Zero();
  fi.normal(fi.axis) = fi.side ? 1.0 : -1.0;
  return fi;
}

TangentialTrace::TangentialTrace(const BoxGrid& g) : grid(g) {
  g.validate();
  for (int f = 0; f < 6; ++f) {
    auto fi = face_info(g, f);
    faces[f].assign(std::size_t(fi.nu_count) * fi.nv_count, CVec3::Zero());
  }
}

FaceInfo TangentialTrace::face(int f) const { return face_info(grid, f); }

std::size_t TangentialTrace::node_of(int f, int iu, int iv) const {
  auto fi = face(f);
  std::array<int, 3> p{};
  p[fi.axis] = fi.side ? grid.n[fi.axis] - 1 : 0;
  p[fi.u] = iu;
  p[fi.v] = iv;
  return grid.index(p[0], p[1], p[2]);
}

double TangentialTrace::area_weight(int f, int iu, int iv) const {
  auto fi = face(f);
  double w = fi.hu * fi.hv;
  if (iu == 0 || iu == fi.nu_count - 1) w *= 0.5;
  if (iv == 0 || iv == fi.nv_count - 1) w *= 0.5;
  return w;
}

TangentialTrace& TangentialTrace::operator+=(const TangentialTrace& o) {
  for (int f = 0; f < 6; ++f)
    for (std::size_t i = 0; i < faces[f].size(); ++i) faces[f][i] += o.faces[f][i];
  return *this;
}
TangentialTrace& TangentialTrace::operator-=(const TangentialTrace& o) {
  for (int f = 0; f < 6; ++f)
    for (std::size_t i = 0; i < faces[f].size(); ++i) faces[f][i] -= o.faces[f][i];
  return *this;
}
TangentialTrace& TangentialTrace::operator*=(cplx s) {
  for (auto& fc : faces)
    for (auto& x : fc) x *= s;
  return *this;
}
double TangentialTrace::max_abs() const {
  double m = 0;
  for (const auto& fc : faces)
    for (const auto& x : fc) m = std::max(m, x.norm());
  return m;
}
double TangentialTrace::l2() const {
  double s = 0;
  for (int f = 0; f < 6; ++f) {
    auto fi = face(f);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu)
        s += area_weight(f, iu, iv) * faces[f][iu + std::size_t(fi.nu_count) * iv].squaredNorm();
  }
  return std::sqrt(s);
}

std::array<std::vector<CVec3>, 6> TangentialTrace::tangential_part() const {
  std::array<std::vector<CVec3>, 6> out;
  for (int f = 0; f < 6; ++f) {
    CVec3 nu = face(f).normal.cast<cplx>();
    out[f].resize(faces[f].size());
    for (std::size_t i = 0; i < faces[f].size(); ++i) out[f][i] = -crossc(nu, faces[f][i]);
  }
  return out;
}

TangentialTrace operator+(TangentialTrace a, const TangentialTrace& b) { return a += b; }
TangentialTrace operator-(TangentialTrace a, const TangentialTrace& b) { return a -= b; }
TangentialTrace operator*(cplx s, TangentialTrace a) { return a *= s; }

TangentialTrace tangential_trace(const ComplexVectorField& field) {
  TangentialTrace t(field.grid);
  for (int f = 0; f < 6; ++f) {
    auto fi = t.face(f);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        const CVec3& w = field[t.node_of(f, iu, iv)];
        // nu = +-e_axis, so the cross product has an exactly zero normal part
        CVec3 r = CVec3::Zero();
        double s = fi.normal(fi.axis);
        int a = fi.axis, b = (a + 1) % 3, c = (a + 2) % 3;
        r(b) = -s * w(c);
        r(c) = s * w(b);
        t.faces[f][iu + std::size_t(fi.nu_count) * iv] = r;
      }
  }
  return t;
}

namespace {

// derivative of a face array along local direction dir (0 = u, 1 = v),
// centered inside, second-order one-sided at the face edges
template <class T>
T face_diff(const std::vector<T>& a, int nu, int nv, double h, int dir, int iu, int iv) {
  auto at = [&](int u, int v) -> const T& { return a[u + std::size_t(nu) * v]; };
  int i = dir == 0 ? iu : iv;
  int n = dir == 0 ? nu : nv;
  auto get = [&](int q) -> const T& { return dir == 0 ? at(q, iv) : at(iu, q); };
  if (i == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2 * h);
  if (i == n - 1) return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2 * h);
  return (get(i + 1) - get(i - 1)) / (2 * h);
}

}  // namespace

BoundaryScalar surface_divergence(const TangentialTrace& trace) {
  BoundaryScalar out;
  for (int f = 0; f < 6; ++f) {
    auto fi = trace.face(f);
    const auto& a = trace.faces[f];
    out[f].assign(a.size(), 0.0);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        CVec3 du = face_diff(a, fi.nu_count, fi.nv_count, fi.hu, 0, iu, iv);
        CVec3 dv = face_diff(a, fi.nu_count, fi.nv_count, fi.hv, 1, iu, iv);
        out[f][iu + std::size_t(fi.nu_count) * iv] = du(fi.u) + dv(fi.v);
      }
  }
  return out;
}

double trace_norm_div(const TangentialTrace& trace, const NormExponent& pe) {
  double p = pe.p;
  double s0 = 0, s1 = 0, s2 = 0;
  auto div = surface_divergence(trace);
  for (int f = 0; f < 6; ++f) {
    auto fi = trace.face(f);
    const auto& a = trace.faces[f];
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        std::size_t i = iu + std::size_t(fi.nu_count) * iv;
        double w = trace.area_weight(f, iu, iv);
        CVec3 du = face_diff(a, fi.nu_count, fi.nv_count, fi.hu, 0, iu, iv);
        CVec3 dv = face_diff(a, fi.nu_count, fi.nv_count, fi.hv, 1, iu, iv);
        s0 += w * std::pow(a[i].norm(), p);
        s1 += w * std::pow(std::sqrt(du.squaredNorm() + dv.squaredNorm()), p);
        s2 += w * std::pow(std::abs(div[f][i]), p);
      }
  }
  return std::pow(s0, 1 / p) + std::pow(s1, 1 / p) + std::pow(s2, 1 / p);
}

double field_norm_lp(const ComplexVectorField& field, double p) {
  double s = 0;
  for (std::size_t i = 0; i < field.v.size(); ++i)
    s += field.grid.node_weight(i) * std::pow(field[i].norm(), p);
  return std::pow(s, 1 / p);
}

double field_norm_w1p(const ComplexVectorField& field, const NormExponent& pe) {
  const BoxGrid& g = field.grid;
  double p = pe.p;
  double s0 = 0, s1 = 0;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        std::size_t idx = g.index(i, j, k);
        std::array<int, 3> q{i, j, k};
        double gsq = 0;
        for (int a = 0; a < 3; ++a) {
          auto at = [&](int s) {
            std::array<int, 3> r = q;
            r[a] = s;
            return field[g.index(r[0], r[1], r[2])];
          };
          int n = g.n[a];
          CVec3 d;
          if (q[a] == 0)
            d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2 * g.h[a]);
          else if (q[a] == n - 1)
            d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2 * g.h[a]);
          else
            d = (at(q[a] + 1) - at(q[a] - 1)) / (2 * g.h[a]);
          gsq += d.squaredNorm();
        }
        double w = g.node_weight(idx);
        s0 += w * std::pow(field[idx].norm(), p);
        s1 += w * std::pow(std::sqrt(gsq), p);
      }
  return std::pow(s0, 1 / p) + std::pow(s1, 1 / p);
}

}  // namespace shg
