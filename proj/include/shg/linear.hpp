#pragma once

#include <memory>
#include <string>
#include <utility>

#include "shg/field.hpp"
#include "shg/yee.hpp"

namespace shg {

struct LinearSolverOptions {
  double tol = 1e-10;
  int max_iter = 600;
  int restart = 60;
  // sparse LU fallback is allowed when every axis has at most this many nodes
  int direct_cutoff = 24;
  // resonance when sigma_min < threshold * sigma_max
  double resonance_threshold = 1e-8;
};

struct LinearSolveReport {
  int iterations = 0;
  double relative_residual = 0;
  double condition_estimate = 0;
  bool resonance = false;
  double stability_constant = 0;
  std::string method;
};

// Solution on the staggered layout (e on edges, h on faces).
struct YeeSolution {
  CVector e, h;
};

struct LinearSolution {
  ComplexVectorField E, H;
  YeeSolution yee;
  LinearSolveReport report;
};

// Assembled curl-curl system for one material channel and one wavenumber.
// Immutable after construction except for lazily built factorizations.
class MaxwellSystem {
 public:
  MaxwellSystem(const MaterialModel& m, double k, int harmonic = 1, LinearSolverOptions opts = {});
  ~MaxwellSystem();

  const YeeGridPtr& yee() const { return yee_; }
  double k() const { return k_; }
  bool constant_coefficients() const { return constant_; }
  const CVector& eps_edges() const { return eps_e_; }
  const CVector& mu_faces() const { return mu_f_; }
  const LinearSolverOptions& options() const { return opts_; }

  // K e on every edge (boundary rows included)
  CVector apply(const CVector& e) const;

  LinearSolution solve_bvp(const TangentialTrace& f) const;
  LinearSolution solve_sources(const ComplexVectorField& Je, const ComplexVectorField* Jm) const;
  // staggered entry point: boundary edge values, electric current on edges,
  // optional magnetic current on faces
  LinearSolution solve_edges(const CVector& boundary_e, const CVector* je, const CVector* jm) const;

  // || (K e)_int - rhs_int || / || rhs_int - (K e_b)_int ||
  double relative_residual(const YeeSolution& s, const CVector* je, const CVector* jm) const;

  // smallest/largest singular value estimates of the interior operator
  std::pair<double, double> singular_value_estimates() const;

  // interior-slot solve K_ii x = b; returns iterations
  int solve_interior(const CVector& b, CVector& x, std::string* method = nullptr) const;

 private:
  CVector interior_rhs(const CVector& boundary_e, const CVector* je, const CVector* jm) const;
  void ensure_matrix() const;

  YeeGridPtr yee_;
  double k_;
  LinearSolverOptions opts_;
  bool constant_;
  CVector eps_e_, mu_f_, inv_mu_f_;
  std::unique_ptr<ConstantCurlCurlSolver> fft_;
  struct Sparse;
  mutable std::unique_ptr<Sparse> sparse_;
};

LinearSolution solve_linear_bvp(const MaterialModel& m, double k_omega, const TangentialTrace& f,
                                int harmonic = 1, const LinearSolverOptions& opts = {});
LinearSolution solve_linear_sources(const MaterialModel& m, double k_omega,
                                    const ComplexVectorField& Je, const ComplexVectorField* Jm,
                                    int harmonic = 1, const LinearSolverOptions& opts = {});

struct ResonanceCheck {
  bool flag = false;
  double condition_estimate = 0;
  double sigma_min = 0, sigma_max = 0;
};
ResonanceCheck detect_resonance(const MaterialModel& m, double omega, double threshold = 1e-8,
                                int harmonic = 1);

// Tangential magnetic trace nu x H computed from the boundary flux of the
// discrete Ampere law, so that pairing it with the trace of a discrete
// conjugate-medium solution reproduces the discrete volume sum.
TangentialTrace magnetic_trace(const MaxwellSystem& sys, const YeeSolution& s,
                               const CVector* je = nullptr);

}  // namespace shg
