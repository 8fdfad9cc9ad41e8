#include "shg/nonlinear.hpp"

#include <cmath>

namespace shg {

namespace {

double vnorm(const CVector& v) {
  double s = 0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double diff_norm(const YeeSolution& a, const YeeSolution& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.e.size(); ++i) s += std::norm(a.e[i] - b.e[i]);
  for (std::size_t i = 0; i < a.h.size(); ++i) s += std::norm(a.h[i] - b.h[i]);
  return s;
}

YeeSolution add(const YeeSolution& a, const YeeSolution& b) {
  YeeSolution r = a;
  for (std::size_t i = 0; i < r.e.size(); ++i) r.e[i] += b.e[i];
  for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] += b.h[i];
  return r;
}

}  // namespace

ShgState ShgState::zero(const YeeGrid& y) {
  ShgState s;
  const BoxGrid& g = y.grid();
  s.e_omega = s.h_omega = s.e_2omega = s.h_2omega = ComplexVectorField(g);
  s.yee_omega.e.assign(y.nedges(), 0.0);
  s.yee_omega.h.assign(y.nfaces(), 0.0);
  s.yee_2omega = s.yee_omega;
  return s;
}

double ShgState::norm() const {
  double s = 0;
  for (const auto* v : {&yee_omega.e, &yee_omega.h, &yee_2omega.e, &yee_2omega.h})
    s += std::pow(vnorm(*v), 2);
  return std::sqrt(s);
}

void ShgSolveOptions::validate() const {
  if (!(epsilon_ball > 0) || !(delta_ball > 0) || !(tol > 0) || max_iter <= 0)
    throw Error(Errc::InvalidConfig, "shg options must be positive");
  if (!(tol < delta_ball)) throw Error(Errc::InvalidConfig, "shg tol must be below delta_ball");
}

std::pair<ComplexVectorField, ComplexVectorField> shg_sources(const ComplexVectorField& Ew,
                                                              const ComplexVectorField& E2w,
                                                              const ComplexVectorField& chi,
                                                              double omega) {
  const BoxGrid& g = chi.grid;
  ComplexVectorField Jw(g), J2w(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (chi[i].squaredNorm() == 0) continue;
    Jw[i] = -kI * omega * dotu(Ew[i].conjugate(), E2w[i]) * chi[i];
    J2w[i] = -2.0 * kI * omega * dotu(Ew[i], Ew[i]) * chi[i];
  }
  return {Jw, J2w};
}

ShgSolver::ShgSolver(const MaterialModel& m, double omega, const LinearSolverOptions& lin)
    : m_(m), omega_(omega) {
  if (!(omega > 0)) throw Error(Errc::DegenerateFrequency, "omega must be positive");
  s1_ = std::make_unique<MaxwellSystem>(m, omega, 1, lin);
  s2_ = std::make_unique<MaxwellSystem>(m, 2 * omega, 2, lin);
}

std::pair<CVector, CVector> ShgSolver::edge_currents(const YeeSolution& w,
                                                     const YeeSolution& w2) const {
  const YeeGrid& y = *s1_->yee();
  auto J = shg_sources(y.edges_to_nodes(w.e), y.edges_to_nodes(w2.e), m_.chi2, omega_);
  return {y.nodes_to_edges(J.first), y.nodes_to_edges(J.second)};
}

ShgState ShgSolver::apply_A(const ShgState& x, const YeeSolution& base_w,
                            const YeeSolution& base_2w) const {
  const YeeGrid& y = *s1_->yee();
  ShgState out = ShgState::zero(y);
  out.iterations = x.iterations;
  out.contraction = x.contraction;
  if (!m_.has_chi2()) return out;
  auto J = edge_currents(add(base_w, x.yee_omega), add(base_2w, x.yee_2omega));
  CVector zero(y.nedges(), 0.0);
  LinearSolution a = s1_->solve_edges(zero, &J.first, nullptr);
  LinearSolution b = s2_->solve_edges(zero, &J.second, nullptr);
  out.yee_omega = std::move(a.yee);
  out.yee_2omega = std::move(b.yee);
  out.e_omega = std::move(a.E);
  out.h_omega = std::move(a.H);
  out.e_2omega = std::move(b.E);
  out.h_2omega = std::move(b.H);
  return out;
}

ShgSolution ShgSolver::solve(const TangentialTrace& fw, const TangentialTrace& f2w,
                             const ShgSolveOptions& opts) const {
  opts.validate();
  NormExponent pe;
  double tn = trace_norm_div(fw, pe) + trace_norm_div(f2w, pe);
  if (!(tn < opts.epsilon_ball))
    throw Error(Errc::SmallnessViolated,
                "trace norm " + std::to_string(tn) + " exceeds epsilon_ball " +
                    std::to_string(opts.epsilon_ball));
  const YeeGrid& y = *s1_->yee();
  LinearSolution b1 = s1_->solve_bvp(fw);
  LinearSolution b2 = s2_->solve_bvp(f2w);
  ShgState x = ShgState::zero(y);
  ShgReport rep;
  rep.trace_norm = tn;
  double prev = -1;
  int bad = 0;
  bool done = !m_.has_chi2();
  int it = 0;
  while (!done) {
    ++it;
    ShgState nx = apply_A(x, b1.yee, b2.yee);
    double d = std::sqrt(diff_norm(nx.yee_omega, x.yee_omega) + diff_norm(nx.yee_2omega, x.yee_2omega));
    double sz = nx.norm();
    if (!std::isfinite(d)) throw Error(Errc::ContractionFailed, "iteration produced non-finite fields");
    if (sz > opts.delta_ball) throw Error(Errc::ContractionFailed, "iterate left the ball X_delta");
    if (prev > 0) {
      double r = d / prev;
      rep.contraction.push_back(r);
      rep.max_contraction = std::max(rep.max_contraction, r);
      bad = r >= 1 ? bad + 1 : 0;
      if (bad >= 3) throw Error(Errc::ContractionFailed, "contraction factor >= 1 three times in a row");
    }
    prev = d;
    x = std::move(nx);
    if (d <= opts.tol * std::max(sz, 1e-300) || sz == 0) done = true;
    else if (it >= opts.max_iter)
      throw Error(Errc::NoConvergence, "Picard iteration hit max_iter");
  }
  rep.iterations = std::max(it, 1);
  x.iterations = rep.iterations;
  x.contraction = rep.contraction;
  rep.correction_norm = x.norm();
  ShgSolution s;
  s.yee_omega = add(b1.yee, x.yee_omega);
  s.yee_2omega = add(b2.yee, x.yee_2omega);
  s.E_omega = y.edges_to_nodes(s.yee_omega.e);
  s.H_omega = y.faces_to_nodes(s.yee_omega.h);
  s.E_2omega = y.edges_to_nodes(s.yee_2omega.e);
  s.H_2omega = y.faces_to_nodes(s.yee_2omega.h);
  rep.residuals = shg_residual(s.yee_omega, s.yee_2omega, m_, omega_);
  double fl = fw.l2() + f2w.l2();
  rep.solution_bound =
      fl > 0 ? (s.E_omega.l2() + s.H_omega.l2() + s.E_2omega.l2() + s.H_2omega.l2()) / fl : 0.0;
  s.report = rep;
  return s;
}

ShgState shg_operator_A(const ShgState& state, const LinearSolution& base_w,
                        const LinearSolution& base_2w, const MaterialModel& m, double omega) {
  ShgSolver solver(m, omega);
  return solver.apply_A(state, base_w.yee, base_2w.yee);
}

ShgSolution solve_shg(const MaterialModel& m, double omega, const TangentialTrace& fw,
                      const TangentialTrace& f2w, const ShgSolveOptions& opts) {
  return ShgSolver(m, omega, opts.linear).solve(fw, f2w, opts);
}

std::array<double, 4> shg_residual(const YeeSolution& w, const YeeSolution& w2,
                                   const MaterialModel& m, double omega) {
  YeeGridPtr yp = make_yee(m.grid);
  const YeeGrid& y = *yp;
  auto J = shg_sources(y.edges_to_nodes(w.e), y.edges_to_nodes(w2.e), m.chi2, omega);
  std::array<double, 4> out{};
  const YeeSolution* sol[2] = {&w, &w2};
  for (int c = 0; c < 2; ++c) {
    int hm = c + 1;
    double k = hm * omega;
    CVector eps = y.scalar_to_edges(m.eps_at(hm));
    CVector mu = y.scalar_to_faces(m.mu_at(hm));
    CVector je = y.nodes_to_edges(c == 0 ? J.first : J.second);
    const YeeSolution& s = *sol[c];
    // curl E - i k mu H = 0 on faces
    CVector ce = y.curl(s.e);
    double rn = 0, sn = 0;
    for (std::size_t i = 0; i < ce.size(); ++i) {
      cplx t = kI * k * mu[i] * s.h[i];
      rn += std::norm(ce[i] - t);
      sn += std::norm(ce[i]) + std::norm(t);
    }
    out[2 * c] = sn > 0 ? std::sqrt(rn / sn) : 0.0;
    // curl H + i k eps E = J on interior edges
    CVector ch = y.curl_t(s.h);
    rn = sn = 0;
    for (std::size_t e : y.interior()) {
      cplx t = kI * k * eps[e] * s.e[e];
      rn += std::norm(ch[e] + t - je[e]);
      sn += std::norm(ch[e]) + std::norm(t) + std::norm(je[e]);
    }
    out[2 * c + 1] = sn > 0 ? std::sqrt(rn / sn) : 0.0;
  }
  return out;
}

}  // namespace shg
