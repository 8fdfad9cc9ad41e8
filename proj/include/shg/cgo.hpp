#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "shg/faddeev.hpp"
#include "shg/field.hpp"

namespace shg {

enum class Variant { V1 = 1, V2 = 2, V3 = 3 };
const char* variant_name(Variant v);
Variant parse_variant(const std::string& s);

// Algebraic: zeta.zeta = +kappa^2 with T = sqrt(tau^2 - kappa^2), the
// documented closed forms. Physical: zeta.zeta = -kappa^2 with
// T = sqrt(tau^2 + kappa^2), which makes e^{zeta.x} A a Maxwell solution.
enum class Dispersion { Algebraic, Physical };

// 1w and 2w are the direct-medium probes, T1w and T2w the conjugate-medium ones.
enum class Channel { Omega, TwoOmega, ConjOmega, ConjTwoOmega };
int harmonic_of(Channel c);
bool is_conjugate(Channel c);

struct CgoDirectionSet {
  Vec3 xi = Vec3::Zero();
  double tau = 0, kappa = 0;
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();  // columns e1, e2, e3
  Variant variant = Variant::V1;
  Dispersion mode = Dispersion::Algebraic;
  double eps0 = 1, mu0 = 1;
  CVec3 zeta1_omega, zeta1_2omega, zetaT_omega, zetaT_2omega;
  CVec3 A1_omega, A1_2omega, AT_omega, AT_2omega;
  CVec3 B1_omega, B1_2omega, BT_omega, BT_2omega;
  // nonzero after adapt_to_grid: amplitudes then live on staggered edges
  Vec3 grid_h = Vec3::Zero();

  double omega() const { return kappa / std::sqrt(eps0 * mu0); }
  bool grid_adapted() const { return grid_h.squaredNorm() > 0; }
  const CVec3& zeta(Channel c) const;
  const CVec3& amplitude(Channel c) const;
  const CVec3& b_amplitude(Channel c) const;
  // amplitude of the node-interpolated product fields
  CVec3 product_amplitude(Channel c) const;
  // amplitude used to sample the field on nodes (trace generation)
  CVec3 node_amplitude(Channel c) const;
  // (conj(A1w) . A12w) conj(ATw), with interpolated amplitudes when adapted
  CVec3 weight() const;

  struct Violations {
    double dispersion = 0, phase = 0, phase2 = 0, transversality = 0, pairing = 0;
    double max() const;
  };
  // relative violations of the defining constraints
  Violations check() const;
};

CgoDirectionSet build_cgo_directions(const Vec3& xi, double tau, double kappa, Variant variant,
                                     Dispersion mode = Dispersion::Algebraic, double eps0 = 1.0,
                                     double mu0 = 1.0);

// Corrects a physical set so that every zeta satisfies the staggered-grid
// dispersion relation sum_a (2 sinh(zeta_a h_a/2)/h_a)^2 = -k^2 while
// conj(z1w) + z12w + conj(zTw) = -i xi stays exact; amplitudes are projected to
// discrete transversality. Newton with continuation in h.
CgoDirectionSet adapt_to_grid(const CgoDirectionSet& ds, const Vec3& h, int steps = 20);

struct PotentialFields {
  BoxGrid grid;
  double omega = 0;
  std::vector<CMat3> V11, V22;
  std::vector<CVec3> w12, w21;  // V12 = w12 x (.), V21 = w21 x (.)
  std::vector<cplx> q_eps, q_mu;
  std::vector<cplx> M_eps, M_mu;  // eps^{1/2}, mu^{1/2}
  double M0_eps = 1, M0_mu = 1;

  Eigen::Matrix<cplx, 6, 6> V_at(std::size_t i) const;
};

// derivatives by centered differences (periodic wrap at the box ends)
PotentialFields potential_matrices(const ScalarField& eps, const ScalarField& mu, double omega,
                                   double eps0 = 1.0, double mu0 = 1.0);
PotentialFields potential_matrices(const MaterialModel& m, double omega, int harmonic = 1);

// eps, mu continued to the super-cell: background outside, with the deviation
// on the domain boundary faded out by a smooth step over half the margin
ScalarField extend_to_supercell(const ScalarField& f, cplx background, const Supercell& sc);

struct CgoOptions {
  double tol = 1e-12;
  int max_iter = 200;
  double p = 4.0;
  int supercell_factor = 2;
};

struct CgoRemainderReport {
  int iterations = 0;
  double contraction_ratio = 0;
  double R_lp = 0, Q_lp = 0;
  double final_update = 0;
};

struct CgoRemainder {
  ComplexVectorField R, Q;  // on the domain grid
  CgoRemainderReport report;
};

CgoRemainder solve_cgo_remainder(const MaterialModel& m, const CgoDirectionSet& ds, Channel which,
                                 const CgoOptions& opts = {});

// Fields of the CGO solution on the domain grid with x measured from the
// domain center.
std::pair<ComplexVectorField, ComplexVectorField> cgo_field(const MaterialModel& m,
                                                            const CgoDirectionSet& ds,
                                                            Channel which,
                                                            const CgoOptions& opts = {},
                                                            CgoRemainderReport* rep = nullptr);

// e^{zeta.(x - x_c)} A sampled on nodes
ComplexVectorField plane_wave(const BoxGrid& g, const CVec3& zeta, const CVec3& A);
// tangential trace of the probe for a channel; vacuum only, uses node amplitudes
TangentialTrace probe_trace(const BoxGrid& g, const CgoDirectionSet& ds, Channel which);

}  // namespace shg
