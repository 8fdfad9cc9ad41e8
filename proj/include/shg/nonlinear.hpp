#pragma once

#include <array>
#include <memory>
#include <vector>

#include "shg/linear.hpp"

namespace shg {

// Zero-trace corrections (E', H') on top of the linear base fields.
struct ShgState {
  ComplexVectorField e_omega, h_omega, e_2omega, h_2omega;
  YeeSolution yee_omega, yee_2omega;
  int iterations = 0;
  std::vector<double> contraction;

  static ShgState zero(const YeeGrid& y);
  double norm() const;  // edge/face l2 of both channels
};

struct ShgSolveOptions {
  double epsilon_ball = 10.0;
  double delta_ball = 1e6;
  double tol = 1e-11;
  int max_iter = 200;
  LinearSolverOptions linear;

  void validate() const;
};

struct ShgReport {
  int iterations = 0;
  std::vector<double> contraction;
  double max_contraction = 0;
  std::array<double, 4> residuals{};
  double trace_norm = 0;
  double solution_bound = 0;  // (|E| + |H|) / sum |f|
  double correction_norm = 0;
};

struct ShgSolution {
  ComplexVectorField E_omega, H_omega, E_2omega, H_2omega;
  YeeSolution yee_omega, yee_2omega;
  ShgReport report;
};

// Polarization currents J^w = -i w chi (conj(Ew).E2w), J^2w = -2 i w chi (Ew.Ew)
// at nodes.
std::pair<ComplexVectorField, ComplexVectorField> shg_sources(const ComplexVectorField& Ew,
                                                              const ComplexVectorField& E2w,
                                                              const ComplexVectorField& chi,
                                                              double omega);

// Holds the two linear systems of one material so repeated solves reuse them.
class ShgSolver {
 public:
  ShgSolver(const MaterialModel& m, double omega, const LinearSolverOptions& lin = {});

  const MaxwellSystem& system(int harmonic) const { return harmonic == 1 ? *s1_ : *s2_; }
  const MaterialModel& material() const { return m_; }
  double omega() const { return omega_; }

  // one application of the fixed-point map
  ShgState apply_A(const ShgState& x, const YeeSolution& base_w, const YeeSolution& base_2w) const;
  ShgSolution solve(const TangentialTrace& fw, const TangentialTrace& f2w,
                    const ShgSolveOptions& opts = {}) const;
  // edge currents of the total fields in a solution
  std::pair<CVector, CVector> edge_currents(const YeeSolution& w, const YeeSolution& w2) const;

 private:
  MaterialModel m_;
  double omega_;
  std::unique_ptr<MaxwellSystem> s1_, s2_;
};

ShgState shg_operator_A(const ShgState& state, const LinearSolution& base_w,
                        const LinearSolution& base_2w, const MaterialModel& m, double omega);

ShgSolution solve_shg(const MaterialModel& m, double omega, const TangentialTrace& fw,
                      const TangentialTrace& f2w, const ShgSolveOptions& opts = {});

// Relative residuals of (Faraday w, Ampere w, Faraday 2w, Ampere 2w) on the
// staggered representation, with the coupling currents recomputed from the
// fields themselves. Ampere rows are interior edges only.
std::array<double, 4> shg_residual(const YeeSolution& w, const YeeSolution& w2,
                                   const MaterialModel& m, double omega);

}  // namespace shg
