#pragma once

#include <array>
#include <optional>
#include <vector>

#include "shg/core.hpp"

namespace shg {

struct BoxGrid {
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> extent{1, 1, 1};
  std::array<int, 3> n{4, 4, 4};
  std::array<double, 3> h{1.0 / 3, 1.0 / 3, 1.0 / 3};

  // throws InvalidGrid
  static BoxGrid make(std::array<double, 3> origin, std::array<double, 3> extent,
                      std::array<int, 3> n);
  static BoxGrid cube(int n, double side, bool centered = true);

  std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n[0]) * (std::size_t(j) + std::size_t(n[1]) * k);
  }
  std::array<int, 3> unindex(std::size_t idx) const;
  Vec3 position(int i, int j, int k) const {
    return Vec3(origin[0] + i * h[0], origin[1] + j * h[1], origin[2] + k * h[2]);
  }
  Vec3 position(std::size_t idx) const {
    auto p = unindex(idx);
    return position(p[0], p[1], p[2]);
  }
  Vec3 center() const {
    return Vec3(origin[0] + extent[0] / 2, origin[1] + extent[1] / 2, origin[2] + extent[2] / 2);
  }
  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == n[0] - 1 || j == n[1] - 1 || k == n[2] - 1;
  }
  // distance in nodes to the nearest face
  int depth(int i, int j, int k) const;
  double volume() const { return extent[0] * extent[1] * extent[2]; }
  // trapezoid weight of node idx
  double node_weight(std::size_t idx) const;
  void validate() const;
  bool same_as(const BoxGrid& o) const;
};

struct ScalarField {
  BoxGrid grid;
  std::vector<cplx> v;

  ScalarField() = default;
  explicit ScalarField(const BoxGrid& g, cplx value = 0.0) : grid(g), v(g.size(), value) {}
  cplx& operator[](std::size_t i) { return v[i]; }
  const cplx& operator[](std::size_t i) const { return v[i]; }
  bool is_constant(double rtol = 0.0) const;
};

struct ComplexVectorField {
  BoxGrid grid;
  std::vector<CVec3> v;

  ComplexVectorField() = default;
  explicit ComplexVectorField(const BoxGrid& g) : grid(g), v(g.size(), CVec3::Zero()) {}
  CVec3& operator[](std::size_t i) { return v[i]; }
  const CVec3& operator[](std::size_t i) const { return v[i]; }

  ComplexVectorField& operator+=(const ComplexVectorField& o);
  ComplexVectorField& operator-=(const ComplexVectorField& o);
  ComplexVectorField& operator*=(cplx s);
  bool all_finite() const;
  double max_abs() const;
  // plain discrete l2 over nodes with trapezoid weights
  double l2() const;
};

ComplexVectorField operator+(ComplexVectorField a, const ComplexVectorField& b);
ComplexVectorField operator-(ComplexVectorField a, const ComplexVectorField& b);
ComplexVectorField operator*(cplx s, ComplexVectorField a);

struct MaterialModel {
  BoxGrid grid;
  ScalarField eps, mu;
  ComplexVectorField chi2;
  double eps0 = 1.0, mu0 = 1.0;
  // overrides for the 2 omega channel
  std::optional<ScalarField> eps_2w, mu_2w;

  static MaterialModel vacuum(const BoxGrid& g, double eps0 = 1.0, double mu0 = 1.0);

  const ScalarField& eps_at(int harmonic) const {
    return (harmonic == 2 && eps_2w) ? *eps_2w : eps;
  }
  const ScalarField& mu_at(int harmonic) const {
    return (harmonic == 2 && mu_2w) ? *mu_2w : mu;
  }
  // conj(eps), conj(mu), same chi2
  MaterialModel conjugate() const;
  bool has_chi2() const;
  // throws ConstraintViolated
  void validate() const;
};

struct FrequencyPair {
  double omega = 1.0;
  double kappa = 1.0;
  static FrequencyPair make(double omega, double eps0 = 1.0, double mu0 = 1.0);
};

struct NormExponent {
  double p = 4.0;
  double delta = 0.75;
  static NormExponent make(double p, double delta = 0.75);
};

// Faces are numbered 2*axis + side, side 0 at the low end. Nodes of a face are
// indexed u-fastest where (u, v) are the two remaining axes in ascending order.
struct FaceInfo {
  int axis, side, u, v, nu_count, nv_count;
  double hu, hv;
  Vec3 normal;
};

struct TangentialTrace {
  BoxGrid grid;
  std::array<std::vector<CVec3>, 6> faces;

  TangentialTrace() = default;
  explicit TangentialTrace(const BoxGrid& g);

  FaceInfo face(int f) const;
  static FaceInfo face_info(const BoxGrid& g, int f);
  // grid node of local face node (iu, iv)
  std::size_t node_of(int f, int iu, int iv) const;
  double area_weight(int f, int iu, int iv) const;

  TangentialTrace& operator+=(const TangentialTrace& o);
  TangentialTrace& operator-=(const TangentialTrace& o);
  TangentialTrace& operator*=(cplx s);
  double max_abs() const;
  double l2() const;
  // E_tan = -nu x t at every face node
  std::array<std::vector<CVec3>, 6> tangential_part() const;
};

TangentialTrace operator+(TangentialTrace a, const TangentialTrace& b);
TangentialTrace operator-(TangentialTrace a, const TangentialTrace& b);
TangentialTrace operator*(cplx s, TangentialTrace a);

TangentialTrace tangential_trace(const ComplexVectorField& field);

using BoundaryScalar = std::array<std::vector<cplx>, 6>;
BoundaryScalar surface_divergence(const TangentialTrace& trace);

double trace_norm_div(const TangentialTrace& trace, const NormExponent& p);
double field_norm_w1p(const ComplexVectorField& field, const NormExponent& p);
double field_norm_lp(const ComplexVectorField& field, double p);

// Samples an analytic function on the nodes.
template <class F>
ComplexVectorField sample_field(const BoxGrid& g, F&& f) {
  ComplexVectorField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

template <class F>
ScalarField sample_scalar(const BoxGrid& g, F&& f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

}  // namespace shg
