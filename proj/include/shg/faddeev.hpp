#pragma once

#include <memory>
#include <utility>

#include "shg/fft.hpp"
#include "shg/field.hpp"

namespace shg {

// Periodic box holding a domain grid in its center, same spacing.
struct Supercell {
  BoxGrid cell;    // period is n*h per axis
  BoxGrid domain;
  std::array<int, 3> offset{};  // domain node (0,0,0) sits at cell node offset

  static Supercell make(const BoxGrid& domain, int factor = 2);
  bool contains_domain_node(int i, int j, int k) const;
  ComplexVectorField embed(const ComplexVectorField& f) const;
  ComplexVectorField restrict_to_domain(const ComplexVectorField& f) const;
  ScalarField restrict_to_domain(const ScalarField& f) const;
  std::array<double, 3> period() const {
    return {cell.n[0] * cell.h[0], cell.n[1] * cell.h[1], cell.n[2] * cell.h[2]};
  }
};

struct FaddeevKernel {
  CVec3 zeta;
  double kappa = 0;
  Supercell supercell;
  // frequency offset in units of the fundamental (0 = plain periodic; 0.5 =
  // antiperiodic, which removes the xi = 0 pole)
  double shift = 0;
  std::vector<cplx> symbol;
  double eta = 0;
  std::size_t zeroed = 0;

  // frequency of FFT index i along axis a
  double frequency(int a, int i) const;
};

// sign = -1 checks zeta.zeta = -kappa^2, +1 checks +kappa^2
FaddeevKernel faddeev_kernel(const CVec3& zeta, const Supercell& sc, double kappa,
                             double eta_rel = 1e-8, int sign = -1, double shift = 0.0);

// G_zeta f; f on the domain grid (zero padded) or on the super-cell.
ComplexVectorField gzeta_convolve(const ComplexVectorField& f, const FaddeevKernel& k);

// (E, H) = G (source_a, source_b) on the super-cell, with G the dyadic
// fundamental solution built from e^{zeta.x} g_zeta (x relative to the cell
// center). Uses the antiperiodic frequency grid so no mode is regularized.
std::pair<ComplexVectorField, ComplexVectorField> dyadic_green_apply(
    const ComplexVectorField& src_a, const ComplexVectorField& src_b, const FrequencyPair& fr,
    const CVec3& zeta, const Supercell& sc, double eps0 = 1.0, double mu0 = 1.0);

// (L - omega)(E, H) evaluated spectrally for fields of the form
// e^{zeta.x} * antiperiodic; the residual oracle for dyadic_green_apply.
std::pair<ComplexVectorField, ComplexVectorField> maxwell_operator_apply(
    const ComplexVectorField& E, const ComplexVectorField& H, const FrequencyPair& fr,
    const CVec3& zeta, const Supercell& sc, double eps0 = 1.0, double mu0 = 1.0);

}  // namespace shg
