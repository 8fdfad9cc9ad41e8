#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "shg/admittance.hpp"
#include "shg/cgo.hpp"

namespace shg {

// eps0^{3/2} eps^{-1} conj(eps)^{-1/2}
ScalarField afactor(const ScalarField& eps, double eps0);

// Maps first-order input traces to the second-order magnetic traces.
using SecondOrderSource = std::function<TracePair(const TracePair&)>;
using SourceFactory = std::function<SecondOrderSource()>;

SecondOrderSource oracle_source(const MaterialModel& truth, double omega);
// s-extraction through the nonlinear forward solver
SecondOrderSource measured_source(const MaterialModel& truth, double omega,
                                  std::vector<double> s_list = {1e-2, 5e-3},
                                  const ShgSolveOptions& opts = {});

struct FourierSampleOptions {
  std::vector<Variant> variants{Variant::V1, Variant::V2, Variant::V3};
  // use the grid-adapted direction sets (vacuum background only)
  bool grid_adapt = true;
  double max_condition = 1e6;
  // when nonempty, F is also computed at these tau and checked for Cauchy behavior
  std::vector<double> tau_sweep;
  CgoOptions cgo;
};

struct FourierSample {
  Vec3 xi = Vec3::Zero();
  CVec3 F = CVec3::Zero();
  double condition = 0;
  std::vector<cplx> pairings;
  std::vector<CVec3> weights;
  std::vector<CVec3> tau_values;  // F along tau_sweep
  double tau_delta = 0;           // last relative change along the sweep
};

// the direction set behind one probe; grid-adapted when requested and the
// background is vacuum-like
CgoDirectionSet probe_directions(const MaterialModel& m, double omega, const Vec3& xi, double tau,
                                 Variant v, const FourierSampleOptions& opts = {});

FourierSample fourier_sample_chi(const SecondOrderSource& src, const MaterialModel& m, double omega,
                                 const Vec3& xi, double tau, const FourierSampleOptions& opts = {});

struct FourierChiData {
  std::vector<Vec3> xi;
  std::vector<CVec3> F;
  std::vector<double> condition;
  std::vector<double> tau_delta;
};

// xi = 2 pi m / P with P = 2 * extent, m in [-mmax, mmax]^3 without 0
std::vector<Vec3> xi_lattice(const BoxGrid& g, int mmax);

struct ReconOptions {
  FourierSampleOptions sample;
  int jobs = 1;
};

struct ReconReport {
  double curl_residual = 0, div_residual = 0;
  std::optional<double> rel_l2_error;
  int missing_modes = 0;
  CVec3 dc = CVec3::Zero();
  double max_condition = 0;
};

struct ReconResult {
  ComplexVectorField chi2;
  ReconReport report;
  FourierChiData data;
};

FourierChiData sample_fourier_data(const SourceFactory& make_src, const MaterialModel& m,
                                   double omega, const std::vector<Vec3>& xi_grid, double tau,
                                   const ReconOptions& opts = {});

// a chi_Omega chi2 on the domain nodes from lattice samples, DC fitted so the
// field vanishes on the super-cell outside the domain
ComplexVectorField invert_fourier(const FourierChiData& data, const BoxGrid& g, CVec3* dc = nullptr,
                                  int* missing = nullptr);

ReconResult reconstruct_chi2(const SourceFactory& make_src, const MaterialModel& m, double omega,
                             const std::vector<Vec3>& xi_grid, double tau,
                             const ReconOptions& opts = {},
                             const ComplexVectorField* truth = nullptr);
ReconResult reconstruct_from_data(const FourierChiData& data, const MaterialModel& m,
                                  const ComplexVectorField* truth = nullptr);

std::pair<double, double> curl_div_residual(const FourierChiData& F);

// sum_nodes h^3 f e^{-i xi.(x - x_c)}
CVec3 node_fourier(const ComplexVectorField& f, const Vec3& xi);

double relative_l2(const ComplexVectorField& a, const ComplexVectorField& ref);

}  // namespace shg
