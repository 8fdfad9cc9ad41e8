#include "shg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include "json.hpp"
#include "shg/io.hpp"
#include "shg/recon.hpp"
#include "shg/serialize.hpp"

namespace shg {

using nlohmann::json;
namespace fs = std::filesystem;

const char* error_module(Errc c) {
  switch (c) {
    case Errc::InvalidGrid:
    case Errc::ConstraintViolated:
      return "field-core";
    case Errc::IllConditionedSymbol:
    case Errc::SupportViolation:
      return "greens-faddeev";
    case Errc::DegenerateFrequency:
    case Errc::ResonantFrequency:
    case Errc::SolveFailed:
      return "linear-maxwell";
    case Errc::SmallnessViolated:
    case Errc::ContractionFailed:
    case Errc::NoConvergence:
      return "nonlinear-shg";
    case Errc::ExtrapolationUnreliable:
      return "admittance-map";
    case Errc::InvalidTau:
    case Errc::InvalidXi:
    case Errc::NeumannDiverged:
      return "cgo-builder";
    case Errc::BranchError:
    case Errc::IllPosedDirections:
    case Errc::TauNotAsymptotic:
      return "chi2-recon";
    case Errc::InvalidConfig:
    case Errc::IoError:
      return "lab-cli";
  }
  return "unknown";
}

namespace {

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

json slope_or_null(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return nullptr;
  for (double v : y)
    if (!(v > 0) || !std::isfinite(v)) return nullptr;
  return loglog_slope(x, y);
}

class Csv {
 public:
  explicit Csv(const fs::path& p) : os_(p) {
    if (!os_) throw Error(Errc::IoError, "cannot write " + p.string());
    os_.precision(17);
    os_ << "parameter,value,measured\n";
  }
  void row(const std::string& param, double value, const std::string& what, double measured) {
    os_ << param << ',' << value << ',' << what << '=' << measured << '\n';
  }

 private:
  std::ofstream os_;
};

struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  unsigned long long seed;
  int jobs;
  std::mt19937_64 rng;
  json report;

  fs::path file(const std::string& name) const { return out / name; }
};

TracePair probe_traces(const ExperimentConfig& c, const BoxGrid& g) {
  const ProbeSpec& p = c.probe;
  TracePair f{TangentialTrace(g), TangentialTrace(g)};
  if (p.amp_omega.norm() == 0 && p.amp_2omega.norm() == 0) {
    // default: a propagating plane wave along z polarized along x at omega
    double kappa = c.omega * std::sqrt(c.eps0 * c.mu0);
    f.omega = tangential_trace(plane_wave(g, CVec3(0, 0, kI * kappa), CVec3(1, 0, 0)));
  } else {
    if (p.amp_omega.norm() > 0) f.omega = tangential_trace(plane_wave(g, p.zeta_omega, p.amp_omega));
    if (p.amp_2omega.norm() > 0)
      f.two_omega = tangential_trace(plane_wave(g, p.zeta_2omega, p.amp_2omega));
  }
  return p.scale * f;
}

TangentialTrace random_plane_trace(const BoxGrid& g, double kappa, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  CVec3 z, a;
  for (int k = 0; k < 3; ++k) {
    z(k) = cplx(0.5 * kappa * u(rng), kappa * u(rng));
    a(k) = cplx(u(rng), u(rng));
  }
  return tangential_trace(plane_wave(g, z, a));
}

json shg_report_json(const ShgReport& r) {
  return json{{"iterations", r.iterations},
              {"contraction", r.contraction},
              {"max_contraction", r.max_contraction},
              {"residuals", r.residuals},
              {"trace_norm", r.trace_norm},
              {"solution_bound", r.solution_bound},
              {"correction_norm", r.correction_norm}};
}

json linear_report_json(const LinearSolveReport& r) {
  return json{{"iterations", r.iterations},
              {"relative_residual", r.relative_residual},
              {"method", r.method},
              {"resonance", r.resonance}};
}

Vec3 smallest_xi(const ExperimentConfig& c) {
  auto xs = c.xi_grid();
  return *std::min_element(xs.begin(), xs.end(), [](const Vec3& a, const Vec3& b) {
    return a.norm() < b.norm();
  });
}

void run_forward(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  MaterialModel m = c.material();
  TracePair f = probe_traces(c, m.grid);
  ShgSolver solver(m, c.omega, c.solver);
  ShgSolution s = solver.solve(f.omega, f.two_omega, c.shg);
  LinearSolution l1 = solver.system(1).solve_bvp(f.omega);
  LinearSolution l2 = solver.system(2).solve_bvp(f.two_omega);
  save_field(ctx.file("E_omega.field").string(), s.E_omega);
  save_field(ctx.file("H_omega.field").string(), s.H_omega);
  save_field(ctx.file("E_2omega.field").string(), s.E_2omega);
  save_field(ctx.file("H_2omega.field").string(), s.H_2omega);
  save_field(ctx.file("E_omega_linear.field").string(), l1.E);
  save_field(ctx.file("E_2omega_linear.field").string(), l2.E);
  ComplexVectorField dw = s.E_omega - l1.E, d2w = s.E_2omega - l2.E;
  ctx.report["forward"] = {
      {"shg", shg_report_json(s.report)},
      {"linear", {linear_report_json(l1.report), linear_report_json(l2.report)}},
      {"chi2_max", m.chi2.max_abs()},
      {"field_l2", {{"E_omega", s.E_omega.l2()}, {"E_2omega", s.E_2omega.l2()}}},
      // nonlinear part of each channel; zero for chi2 = 0
      {"chi_channels", {{"omega", dw.l2()}, {"two_omega", d2w.l2()}}},
  };
}

void run_admittance(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  MaterialModel m = c.material();
  TracePair f = probe_traces(c, m.grid);
  AdmittanceMap am(m, c.omega, c.shg);
  Csv csv(ctx.file("admittance.csv"));
  std::vector<double> ss, e2;
  json samples = json::array();
  for (std::size_t i = 0; i < c.s_list.size(); ++i) {
    double s = c.s_list[i];
    ShgSolution sol = am.solver().solve(s * f.omega, s * f.two_omega, c.shg);
    auto J = am.solver().edge_currents(sol.yee_omega, sol.yee_2omega);
    TracePair out{magnetic_trace(am.solver().system(1), sol.yee_omega, &J.first),
                  magnetic_trace(am.solver().system(2), sol.yee_2omega, &J.second)};
    std::string tag = "s" + std::to_string(i);
    json files = {{"input", {{"omega", tag + "_f_omega.trace"}, {"two_omega", tag + "_f_2omega.trace"}}},
                  {"output", {{"omega", tag + "_tH_omega.trace"}, {"two_omega", tag + "_tH_2omega.trace"}}}};
    save_trace(ctx.file(files["input"]["omega"]).string(), s * f.omega);
    save_trace(ctx.file(files["input"]["two_omega"]).string(), s * f.two_omega);
    save_trace(ctx.file(files["output"]["omega"]).string(), out.omega);
    save_trace(ctx.file(files["output"]["two_omega"]).string(), out.two_omega);
    double n2 = sol.E_2omega.l2();
    ss.push_back(s);
    e2.push_back(n2);
    csv.row("s", s, "tH_omega_l2", out.omega.l2());
    csv.row("s", s, "tH_2omega_l2", out.two_omega.l2());
    csv.row("s", s, "E_2omega_l2", n2);
    samples.push_back({{"s", s},
                       {"input", files["input"]},
                       {"output", files["output"]},
                       {"tH_omega_l2", out.omega.l2()},
                       {"tH_2omega_l2", out.two_omega.l2()},
                       {"E_2omega_l2", n2},
                       {"shg", shg_report_json(sol.report)}});
  }
  // the 2w output is quadratic in s when no 2w input is sent
  ctx.report["admittance"] = {{"samples", samples}, {"E_2omega_slope", slope_or_null(ss, e2)}};
}

void run_linearize(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  MaterialModel m = c.material();
  TracePair f = probe_traces(c, m.grid);
  AdmittanceMap am(m, c.omega, c.shg);
  TracePair lin = am.linear(f).output;
  TracePair second = am.second_order(f).tH;
  Csv csv(ctx.file("linearize.csv"));
  std::vector<double> ss, r1, r2;
  for (double s : c.s_list) {
    TracePair d = am.nonlinear(cplx(s) * f).output - cplx(s) * lin;
    double a = trace_pair_l2(cplx(1.0 / s) * d);
    double b = trace_pair_l2(cplx(1.0 / (s * s)) * d - second);
    ss.push_back(s);
    r1.push_back(a);
    r2.push_back(b);
    csv.row("s", s, "first_order_remainder", a);
    csv.row("s", s, "second_order_remainder", b);
  }
  AdmittanceFn nl = [&](const TracePair& g) { return am.nonlinear(g).output; };
  AdmittanceFn li = [&](const TracePair& g) { return am.linear(g).output; };
  ExtractedTrace ex = extract_second_order_trace(nl, li, f, c.s_list);
  double ref = trace_pair_l2(second);
  ctx.report["linearize"] = {
      {"s", ss},
      {"first_order_remainder", r1},
      {"second_order_remainder", r2},
      {"first_order_slope", slope_or_null(ss, r1)},
      {"second_order_slope", slope_or_null(ss, r2)},
      {"extracted_error_estimate", ex.error_estimate},
      {"extracted_vs_oracle", ref > 0 ? trace_pair_l2(ex.trace - second) / ref : 0.0},
  };
}

void run_cgo_check(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  Csv csv(ctx.file("cgo_check.csv"));
  // algebraic invariants on random parameters
  std::uniform_real_distribution<double> u(-1, 1), pos(0, 1);
  double worst = 0;
  for (int i = 0; i < c.cgo_samples; ++i) {
    Vec3 xi(10 * u(ctx.rng), 10 * u(ctx.rng), 10 * u(ctx.rng));
    if (xi.norm() < 1e-3) xi(0) = 1;
    double kappa = 0.5 + 2.5 * pos(ctx.rng);
    double tau = kappa + 1 + 99 * pos(ctx.rng);
    auto v = static_cast<Variant>(1 + int(3 * pos(ctx.rng)) % 3);
    double viol = build_cgo_directions(xi, tau, kappa, v).check().max();
    worst = std::max(worst, viol);
    csv.row("sample", i, "max_violation", viol);
  }
  MaterialModel m = c.material();
  double kappa = c.omega * std::sqrt(c.eps0 * c.mu0);
  Vec3 xi = smallest_xi(c);
  // remainder decay for the configured medium
  std::vector<double> taus, rl;
  json per_tau = json::array(), dirs = json::array();
  for (double tau : c.tau) {
    CgoDirectionSet ds =
        build_cgo_directions(xi, tau, kappa, c.variants[0], Dispersion::Physical, c.eps0, c.mu0);
    CgoRemainder r = solve_cgo_remainder(m, ds, Channel::ConjOmega, c.cgo);
    dirs.push_back(to_json(ds));
    taus.push_back(tau);
    rl.push_back(r.report.R_lp);
    csv.row("tau", tau, "R_lp", r.report.R_lp);
    per_tau.push_back({{"tau", tau},
                       {"R_lp", r.report.R_lp},
                       {"Q_lp", r.report.Q_lp},
                       {"iterations", r.report.iterations},
                       {"contraction_ratio", r.report.contraction_ratio}});
  }
  std::ofstream(ctx.file("directions.json")) << dirs.dump(1) << "\n";
  ctx.report["cgo_check"] = {{"samples", c.cgo_samples},
                             {"max_violation", worst},
                             {"xi", vjson(xi)},
                             {"remainder", per_tau},
                             {"tau_exponent", slope_or_null(taus, rl)}};
}

void run_identity_check(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  MaterialModel m = c.material();
  const BoxGrid& g = m.grid;
  double kappa = c.omega * std::sqrt(c.eps0 * c.mu0);
  TracePair f = probe_traces(c, g);
  if (f.two_omega.max_abs() == 0) f.two_omega = random_plane_trace(g, 2 * kappa, ctx.rng);
  TracePair ft{random_plane_trace(g, kappa, ctx.rng), random_plane_trace(g, 2 * kappa, ctx.rng)};
  AdmittanceMap am(m, c.omega, c.shg);
  SecondOrderFields so = am.second_order(f);
  ShgSolver conj(m.conjugate(), c.omega, c.solver);
  LinearSolution t1 = conj.system(1).solve_bvp(ft.omega);
  LinearSolution t2 = conj.system(2).solve_bvp(ft.two_omega);
  cplx B = boundary_pairing(so.tH, ft);
  cplx V = volume_pairing(m.chi2, so.E1_omega, so.E1_2omega, t1.E, t2.E, c.omega);
  double scale = std::max(std::abs(B), std::abs(V));
  ctx.report["identity_check"] = {
      {"boundary_pairing", cjson(B)},
      {"volume_pairing", cjson(V)},
      {"difference", cjson(B - V)},
      {"relative_difference", scale > 0 ? std::abs(B - V) / scale : 0.0},
  };
}

void run_reconstruct(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  MaterialModel truth = c.material();
  MaterialModel known = truth;
  known.chi2 = ComplexVectorField(truth.grid);
  std::vector<Vec3> xs = c.xi_grid();
  double tau = c.tau[c.tau.size() / 2];
  SourceFactory make;
  if (c.recon_source == "oracle") {
    make = [&] { return oracle_source(truth, c.omega); };
  } else {
    make = [&] { return measured_source(truth, c.omega, c.s_list, c.shg); };
  }
  ReconOptions ro;
  ro.sample.variants = c.variants;
  ro.sample.grid_adapt = c.grid_adapt;
  ro.sample.cgo = c.cgo;
  ro.jobs = ctx.jobs;
  const ComplexVectorField* ref = truth.has_chi2() ? &truth.chi2 : nullptr;
  ReconResult r = reconstruct_chi2(make, known, c.omega, xs, tau, ro, ref);
  save_field(ctx.file("chi2_recon.field").string(), r.chi2);
  Csv csv(ctx.file("reconstruct.csv"));
  for (std::size_t i = 0; i < r.data.xi.size(); ++i) csv.row("mode", double(i), "abs_F", r.data.F[i].norm());
  std::ofstream(ctx.file("fourier_data.json")) << to_json(r.data).dump(1) << "\n";
  json dirs = json::array();
  for (const Vec3& xi : xs)
    for (Variant v : c.variants) dirs.push_back(to_json(probe_directions(known, c.omega, xi, tau, v, ro.sample)));
  std::ofstream(ctx.file("directions.json")) << dirs.dump() << "\n";
  json rep = to_json(r.report);
  rep["source"] = c.recon_source;
  rep["tau"] = tau;
  rep["modes"] = xs.size();
  ctx.report["reconstruct"] = rep;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const std::string& subcommand,
                   const RunOptions& opts) {
  config.validate();
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
    throw ConfigError("subcommand", "unknown subcommand '" + subcommand + "'");
  if (opts.jobs < 1) throw ConfigError("jobs", "must be positive");
  unsigned long long seed = opts.seed.value_or(config.seed);
  fs::path out = opts.out_dir.value_or(config.output);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + out.string() + ": " + ec.message());

  Context ctx{config, out, seed, opts.jobs, std::mt19937_64(seed), json::object()};
  ctx.report["subcommand"] = subcommand;
  ctx.report["schema_version"] = config.schema_version;
  ctx.report["seed"] = seed;
  ctx.report["rng"] = "mt19937_64";
  {
    std::ofstream(ctx.file("config.yaml")) << serialize_config(config);
  }
  int status = 0;
  try {
    if (subcommand == "forward") run_forward(ctx);
    else if (subcommand == "admittance") run_admittance(ctx);
    else if (subcommand == "linearize") run_linearize(ctx);
    else if (subcommand == "cgo-check") run_cgo_check(ctx);
    else if (subcommand == "identity-check") run_identity_check(ctx);
    else run_reconstruct(ctx);
    ctx.report["status"] = "ok";
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    ctx.report["status"] = "error";
    ctx.report["error"] = {{"module", error_module(e.code())},
                           {"code", errc_name(e.code())},
                           {"message", e.what()}};
    std::cerr << "shglab: [" << error_module(e.code()) << "] " << e.what() << "\n";
    status = 1;
  }
  std::ofstream os(ctx.file("report.json"));
  if (!os) throw Error(Errc::IoError, "cannot write report.json");
  os << ctx.report.dump(2) << "\n";
  return status;
}

}  // namespace shg
