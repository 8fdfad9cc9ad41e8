#include "shg/faddeev.hpp"

#include <cmath>

namespace shg {

Supercell Supercell::make(const BoxGrid& domain, int factor) {
  if (factor < 2) throw Error(Errc::InvalidGrid, "super-cell factor must be at least 2");
  Supercell s;
  s.domain = domain;
  std::array<int, 3> n{};
  std::array<double, 3> o{}, ext{};
  for (int a = 0; a < 3; ++a) {
    n[a] = factor * (domain.n[a] - 1);
    if (n[a] % 2) ++n[a];
    s.offset[a] = (n[a] - domain.n[a] + 1) / 2;
    o[a] = domain.origin[a] - s.offset[a] * domain.h[a];
    ext[a] = (n[a] - 1) * domain.h[a];
  }
  s.cell = BoxGrid::make(o, ext, n);
  s.cell.h = domain.h;
  return s;
}

bool Supercell::contains_domain_node(int i, int j, int k) const {
  std::array<int, 3> p{i - offset[0], j - offset[1], k - offset[2]};
  for (int a = 0; a < 3; ++a)
    if (p[a] < 0 || p[a] >= domain.n[a]) return false;
  return true;
}

ComplexVectorField Supercell::embed(const ComplexVectorField& f) const {
  if (!f.grid.same_as(domain)) throw Error(Errc::InvalidGrid, "field is not on the domain grid");
  ComplexVectorField out(cell);
  for (int k = 0; k < domain.n[2]; ++k)
    for (int j = 0; j < domain.n[1]; ++j)
      for (int i = 0; i < domain.n[0]; ++i)
        out[cell.index(i + offset[0], j + offset[1], k + offset[2])] = f[domain.index(i, j, k)];
  return out;
}

ComplexVectorField Supercell::restrict_to_domain(const ComplexVectorField& f) const {
  ComplexVectorField out(domain);
  for (int k = 0; k < domain.n[2]; ++k)
    for (int j = 0; j < domain.n[1]; ++j)
      for (int i = 0; i < domain.n[0]; ++i)
        out[domain.index(i, j, k)] = f[cell.index(i + offset[0], j + offset[1], k + offset[2])];
  return out;
}

ScalarField Supercell::restrict_to_domain(const ScalarField& f) const {
  ScalarField out(domain);
  for (int k = 0; k < domain.n[2]; ++k)
    for (int j = 0; j < domain.n[1]; ++j)
      for (int i = 0; i < domain.n[0]; ++i)
        out[domain.index(i, j, k)] = f[cell.index(i + offset[0], j + offset[1], k + offset[2])];
  return out;
}

double FaddeevKernel::frequency(int a, int i) const {
  int n = supercell.cell.n[a];
  int m = i < (n + 1) / 2 ? i : i - n;
  return 2 * M_PI * (m + shift) / (n * supercell.cell.h[a]);
}

namespace {

Vec3 freq_vec(const FaddeevKernel& k, std::size_t idx) {
  auto p = k.supercell.cell.unindex(idx);
  return Vec3(k.frequency(0, p[0]), k.frequency(1, p[1]), k.frequency(2, p[2]));
}

// position relative to the cell center
Vec3 rel_pos(const Supercell& sc, std::size_t idx) {
  return sc.cell.position(idx) - sc.cell.center();
}

void check_support(const ComplexVectorField& f, const Supercell& sc) {
  const BoxGrid& g = sc.cell;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i)
        if (!sc.contains_domain_node(i, j, k) && f[g.index(i, j, k)].squaredNorm() > 0)
          throw Error(Errc::SupportViolation, "source is nonzero in the padding margin");
}

ComplexVectorField to_cell(const ComplexVectorField& f, const Supercell& sc) {
  if (f.grid.same_as(sc.cell)) {
    check_support(f, sc);
    return f;
  }
  return sc.embed(f);
}

// per-component spectra of e^{-(zeta + i theta).y} f
std::array<std::vector<cplx>, 3> spectra(const ComplexVectorField& f, const CVec3& zeta,
                                         const Vec3& theta, const Supercell& sc, const Fft3& fft) {
  std::array<std::vector<cplx>, 3> out;
  std::size_t N = sc.cell.size();
  for (auto& c : out) c.resize(N);
  CVec3 z = zeta + kI * theta.cast<cplx>();
  for (std::size_t i = 0; i < N; ++i) {
    cplx w = std::exp(-dotu(z, rel_pos(sc, i).cast<cplx>()));
    for (int c = 0; c < 3; ++c) out[c][i] = w * f[i](c);
  }
  for (auto& c : out) fft.forward(c);
  return out;
}

ComplexVectorField from_spectra(std::array<std::vector<cplx>, 3>& s, const CVec3& zeta,
                                const Vec3& theta, const Supercell& sc, const Fft3& fft) {
  for (auto& c : s) fft.inverse(c);
  ComplexVectorField out(sc.cell);
  CVec3 z = zeta + kI * theta.cast<cplx>();
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    cplx w = std::exp(dotu(z, rel_pos(sc, i).cast<cplx>()));
    for (int c = 0; c < 3; ++c) out[i](c) = w * s[c][i];
  }
  return out;
}

Vec3 twist(const Supercell& sc, double shift) {
  auto P = sc.period();
  return Vec3(2 * M_PI * shift / P[0], 2 * M_PI * shift / P[1], 2 * M_PI * shift / P[2]);
}

}  // namespace

FaddeevKernel faddeev_kernel(const CVec3& zeta, const Supercell& sc, double kappa, double eta_rel,
                             int sign, double shift) {
  cplx zz = dotu(zeta, zeta);
  double target = sign * kappa * kappa;
  if (std::abs(zz - target) > 1e-10 * std::max(1.0, zeta.squaredNorm()))
    throw Error(Errc::ConstraintViolated, "zeta.zeta does not match the dispersion relation");
  FaddeevKernel k;
  k.zeta = zeta;
  k.kappa = kappa;
  k.supercell = sc;
  k.shift = shift;
  std::size_t N = sc.cell.size();
  std::vector<cplx> den(N);
  double dmax = 0;
  for (std::size_t i = 0; i < N; ++i) {
    Vec3 xi = freq_vec(k, i);
    den[i] = xi.squaredNorm() - 2.0 * kI * dotu(zeta, xi.cast<cplx>());
    dmax = std::max(dmax, std::abs(den[i]));
  }
  k.eta = eta_rel * dmax;
  k.symbol.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (std::abs(den[i]) < k.eta || std::abs(den[i]) == 0.0) {
      k.symbol[i] = 0.0;
      ++k.zeroed;
    } else {
      k.symbol[i] = 1.0 / den[i];
    }
  }
  if (double(k.zeroed) > 1e-3 * double(N))
    throw Error(Errc::IllConditionedSymbol, std::to_string(k.zeroed) + " symbol nodes below floor");
  return k;
}

ComplexVectorField gzeta_convolve(const ComplexVectorField& f, const FaddeevKernel& k) {
  const Supercell& sc = k.supercell;
  ComplexVectorField fc = to_cell(f, sc);
  Fft3 fft(sc.cell.n);
  Vec3 th = twist(sc, k.shift);
  std::size_t N = sc.cell.size();
  std::array<std::vector<cplx>, 3> s;
  for (auto& c : s) c.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    cplx w = k.shift != 0 ? std::exp(-kI * th.dot(rel_pos(sc, i))) : cplx(1.0);
    for (int c = 0; c < 3; ++c) s[c][i] = w * fc[i](c);
  }
  for (auto& c : s) {
    fft.forward(c);
    for (std::size_t i = 0; i < N; ++i) c[i] *= k.symbol[i];
    fft.inverse(c);
  }
  ComplexVectorField out(sc.cell);
  for (std::size_t i = 0; i < N; ++i) {
    cplx w = k.shift != 0 ? std::exp(kI * th.dot(rel_pos(sc, i))) : cplx(1.0);
    for (int c = 0; c < 3; ++c) out[i](c) = w * s[c][i];
  }
  return out;
}

std::pair<ComplexVectorField, ComplexVectorField> dyadic_green_apply(
    const ComplexVectorField& src_a, const ComplexVectorField& src_b, const FrequencyPair& fr,
    const CVec3& zeta, const Supercell& sc, double eps0, double mu0) {
  double kap = fr.kappa, om = fr.omega;
  if (!(kap > 0) || !(om > 0)) throw Error(Errc::DegenerateFrequency, "kappa must be positive");
  FaddeevKernel k = faddeev_kernel(zeta, sc, kap, 1e-8, -1, 0.5);
  ComplexVectorField a = to_cell(src_a, sc), b = to_cell(src_b, sc);
  Fft3 fft(sc.cell.n);
  Vec3 th = twist(sc, 0.5);
  auto A = spectra(a, zeta, th, sc, fft);
  auto B = spectra(b, zeta, th, sc, fft);
  std::size_t N = sc.cell.size();
  std::array<std::vector<cplx>, 3> Es, Hs;
  for (int c = 0; c < 3; ++c) {
    Es[c].resize(N);
    Hs[c].resize(N);
  }
  double pre = kap * kap / om;
  for (std::size_t i = 0; i < N; ++i) {
    CVec3 D = zeta + kI * freq_vec(k, i).cast<cplx>();
    CVec3 ua(A[0][i], A[1][i], A[2][i]), ub(B[0][i], B[1][i], B[2][i]);
    ua *= k.symbol[i];
    ub *= k.symbol[i];
    CVec3 e = pre * (ua + D * dotu(D, ua) / (kap * kap) + kI / (om * eps0) * crossc(D, ub));
    CVec3 h = pre * (-kI / (om * mu0) * crossc(D, ua) + ub + D * dotu(D, ub) / (kap * kap));
    for (int c = 0; c < 3; ++c) {
      Es[c][i] = e(c);
      Hs[c][i] = h(c);
    }
  }
  return {from_spectra(Es, zeta, th, sc, fft), from_spectra(Hs, zeta, th, sc, fft)};
}

std::pair<ComplexVectorField, ComplexVectorField> maxwell_operator_apply(
    const ComplexVectorField& E, const ComplexVectorField& H, const FrequencyPair& fr,
    const CVec3& zeta, const Supercell& sc, double eps0, double mu0) {
  FaddeevKernel k;
  k.supercell = sc;
  k.shift = 0.5;
  Fft3 fft(sc.cell.n);
  Vec3 th = twist(sc, 0.5);
  auto Es = spectra(E, zeta, th, sc, fft);
  auto Hs = spectra(H, zeta, th, sc, fft);
  std::size_t N = sc.cell.size();
  for (std::size_t i = 0; i < N; ++i) {
    CVec3 D = zeta + kI * freq_vec(k, i).cast<cplx>();
    CVec3 e(Es[0][i], Es[1][i], Es[2][i]), h(Hs[0][i], Hs[1][i], Hs[2][i]);
    CVec3 ra = kI / eps0 * crossc(D, h) - fr.omega * e;
    CVec3 rb = -kI / mu0 * crossc(D, e) - fr.omega * h;
    for (int c = 0; c < 3; ++c) {
      Es[c][i] = ra(c);
      Hs[c][i] = rb(c);
    }
  }
  return {from_spectra(Es, zeta, th, sc, fft), from_spectra(Hs, zeta, th, sc, fft)};
}

}  // namespace shg
