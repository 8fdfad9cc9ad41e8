#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "shg/nonlinear.hpp"

namespace shg {

struct TracePair {
  TangentialTrace omega, two_omega;
};

struct AdmittanceSample {
  TracePair input;
  TracePair output;  // t(H^w), t(H^2w)
  double s = 1.0;
  ShgReport report;
  std::array<LinearSolveReport, 2> linear;
};

struct SecondOrderFields {
  ComplexVectorField E_omega, H_omega, E_2omega, H_2omega;
  YeeSolution yee_omega, yee_2omega;
  TracePair tH;            // flux-consistent magnetic traces
  ComplexVectorField E1_omega, E1_2omega;  // first-order fields at nodes
};

// Both solvers are built once per material; the sample functions only solve.
class AdmittanceMap {
 public:
  AdmittanceMap(const MaterialModel& m, double omega, const ShgSolveOptions& opts = {});

  const ShgSolver& solver() const { return solver_; }
  AdmittanceSample nonlinear(const TracePair& f) const;
  AdmittanceSample linear(const TracePair& f) const;
  SecondOrderFields second_order(const TracePair& f) const;

 private:
  ShgSolveOptions opts_;
  ShgSolver solver_;
};

AdmittanceSample admittance_nonlinear(const MaterialModel& m, double omega, const TracePair& f,
                                      const ShgSolveOptions& opts = {});
AdmittanceSample admittance_linear(const MaterialModel& m, double omega, const TracePair& f,
                                   const LinearSolverOptions& opts = {});
SecondOrderFields second_order_fields(const MaterialModel& m, double omega, const TracePair& f,
                                      const LinearSolverOptions& opts = {});

using AdmittanceFn = std::function<TracePair(const TracePair&)>;

struct ExtractedTrace {
  TracePair trace;
  double error_estimate = 0;  // relative, in l2 over both channels
  std::vector<double> s_list;
  std::vector<TracePair> quotients;  // s^-2 [L(s f) - s L_lin f] per s
};

// Richardson extrapolation of s^-2 [L(s f) - s L_lin(f)] to s = 0.
ExtractedTrace extract_second_order_trace(const AdmittanceFn& nonlinear, const AdmittanceFn& linear,
                                          const TracePair& f, std::vector<double> s_list = {1e-2,
                                                                                            5e-3});

// sum over channels and faces of t(H) . conj(E~_tan) dS, E~_tan = -nu x t(E~)
cplx boundary_pairing(const TracePair& tH, const TracePair& tE);
cplx boundary_pairing(const TangentialTrace& tH, const TangentialTrace& tE);

// -i w int chi.[(conj(E1w).E12w) conj(E~w) + 2 (E1w.E1w) conj(E~2w)] dx,
// midpoint rule on cells with trilinear cell-center values
cplx volume_pairing(const ComplexVectorField& chi, const ComplexVectorField& E1w,
                    const ComplexVectorField& E12w, const ComplexVectorField& Etw,
                    const ComplexVectorField& Et2w, double omega);

double trace_pair_l2(const TracePair& t);
TracePair operator-(const TracePair& a, const TracePair& b);
TracePair operator*(cplx s, const TracePair& a);

}  // namespace shg
