#include "shg/config.hpp"

#include <yaml-cpp/yaml.h>

#include "shg/recon.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace shg {

cplx Primitive::value(const Vec3& x) const {
  if (type == "constant") return amplitude;
  if (type == "gaussian") {
    double r2 = (x - center).squaredNorm();
    double g = std::exp(-r2 / (2 * sigma * sigma));
    if (cutoff > 0) {
      double q = r2 / (cutoff * cutoff);
      g = q < 1 ? g * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    }
    return amplitude * g;
  }
  // smoothed box
  double v = 1;
  for (int a = 0; a < 3; ++a)
    v *= 0.5 * (std::tanh((x(a) - lo(a)) / width) - std::tanh((x(a) - hi(a)) / width));
  return amplitude * v;
}

namespace {

struct Reader {
  std::string path;
  YAML::Node node;

  int line() const { return node.IsDefined() ? node.Mark().line + 1 : -1; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path, msg, line()); }
  bool has(const std::string& key) const { return node.IsMap() && node[key].IsDefined(); }
  Reader operator[](const std::string& key) const {
    return Reader{path.empty() ? key : path + "." + key, node[key]};
  }
  Reader at(std::size_t i) const { return Reader{path + "[" + std::to_string(i) + "]", node[i]}; }
  std::size_t size() const {
    if (!node.IsSequence()) fail("expected a list");
    return node.size();
  }

  double real() const {
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail("expected a number");
    }
  }
  int integer() const {
    try {
      return node.as<int>();
    } catch (const YAML::Exception&) {
      fail("expected an integer");
    }
  }
  std::string str() const {
    try {
      return node.as<std::string>();
    } catch (const YAML::Exception&) {
      fail("expected a string");
    }
  }
  bool boolean() const {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail("expected true/false");
    }
  }
  cplx complex() const {
    if (node.IsSequence()) {
      if (node.size() != 2) fail("complex numbers are [re, im]");
      return {at(0).real(), at(1).real()};
    }
    return real();
  }
  Vec3 vec3() const {
    if (!node.IsSequence() || node.size() != 3) fail("expected three numbers");
    return Vec3(at(0).real(), at(1).real(), at(2).real());
  }
  CVec3 cvec3() const {
    if (!node.IsSequence() || node.size() != 3) fail("expected three (complex) numbers");
    return CVec3(at(0).complex(), at(1).complex(), at(2).complex());
  }
  std::array<double, 3> triple() const {
    if (node.IsScalar()) {
      double v = real();
      return {v, v, v};
    }
    Vec3 v = vec3();
    return {v(0), v(1), v(2)};
  }
  std::vector<double> reals() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).real());
    return out;
  }
};

Primitive read_primitive(const Reader& r, bool vector_valued) {
  Primitive p;
  if (!r.node.IsMap()) r.fail("expected a mapping with a 'type' key");
  if (r.has("type")) p.type = r["type"].str();
  if (p.type != "constant" && p.type != "gaussian" && p.type != "box")
    r["type"].fail("unknown primitive '" + p.type + "' (constant, gaussian, box)");
  if (r.has("value")) p.amplitude = r["value"].complex();
  if (r.has("amplitude")) p.amplitude = r["amplitude"].complex();
  if (r.has("center")) p.center = r["center"].vec3();
  if (r.has("sigma")) p.sigma = r["sigma"].real();
  if (r.has("cutoff")) p.cutoff = r["cutoff"].real();
  if (r.has("lo")) p.lo = r["lo"].vec3();
  if (r.has("hi")) p.hi = r["hi"].vec3();
  if (r.has("width")) p.width = r["width"].real();
  if (vector_valued && r.has("direction")) p.direction = r["direction"].cvec3();
  if (p.type == "gaussian" && !(p.sigma > 0)) r["sigma"].fail("must be positive");
  if (p.type == "box" && !(p.width > 0)) r["width"].fail("must be positive");
  if (p.cutoff < 0) r["cutoff"].fail("must be nonnegative");
  return p;
}

std::vector<Primitive> read_profile(const Reader& r, bool vector_valued) {
  std::vector<Primitive> out;
  if (r.node.IsScalar() || (r.node.IsSequence() && r.node.size() == 2 && r.node[0].IsScalar())) {
    Primitive p;
    p.amplitude = r.complex();
    out.push_back(p);
    return out;
  }
  if (r.node.IsMap()) return {read_primitive(r, vector_valued)};
  for (std::size_t i = 0; i < r.size(); ++i) out.push_back(read_primitive(r.at(i), vector_valued));
  return out;
}

ScalarField eval_scalar(const BoxGrid& g, const std::vector<Primitive>& prof) {
  return sample_scalar(g, [&](const Vec3& x) {
    cplx s = 0;
    for (const auto& p : prof) s += p.value(x);
    return s;
  });
}

void emit_complex(YAML::Emitter& e, cplx z) {
  if (z.imag() == 0) {
    e << z.real();
    return;
  }
  e << YAML::Flow << YAML::BeginSeq << z.real() << z.imag() << YAML::EndSeq;
}

void emit_vec(YAML::Emitter& e, const Vec3& v) {
  e << YAML::Flow << YAML::BeginSeq << v(0) << v(1) << v(2) << YAML::EndSeq;
}

void emit_cvec(YAML::Emitter& e, const CVec3& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (int a = 0; a < 3; ++a) emit_complex(e, v(a));
  e << YAML::EndSeq;
}

void emit_profile(YAML::Emitter& e, const std::vector<Primitive>& prof, bool vector_valued) {
  e << YAML::BeginSeq;
  for (const auto& p : prof) {
    e << YAML::BeginMap << YAML::Key << "type" << YAML::Value << p.type;
    e << YAML::Key << "amplitude" << YAML::Value;
    emit_complex(e, p.amplitude);
    if (p.type == "gaussian") {
      e << YAML::Key << "center" << YAML::Value;
      emit_vec(e, p.center);
      e << YAML::Key << "sigma" << YAML::Value << p.sigma;
      e << YAML::Key << "cutoff" << YAML::Value << p.cutoff;
    } else if (p.type == "box") {
      e << YAML::Key << "lo" << YAML::Value;
      emit_vec(e, p.lo);
      e << YAML::Key << "hi" << YAML::Value;
      emit_vec(e, p.hi);
      e << YAML::Key << "width" << YAML::Value << p.width;
    }
    if (vector_valued) {
      e << YAML::Key << "direction" << YAML::Value;
      emit_cvec(e, p.direction);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
}

}  // namespace

BoxGrid ExperimentConfig::grid() const { return BoxGrid::make(origin, extent, n); }

MaterialModel ExperimentConfig::material() const {
  BoxGrid g = grid();
  MaterialModel m = MaterialModel::vacuum(g, eps0, mu0);
  m.eps = eval_scalar(g, eps);
  m.mu = eval_scalar(g, mu);
  if (eps_2w) m.eps_2w = eval_scalar(g, *eps_2w);
  if (mu_2w) m.mu_2w = eval_scalar(g, *mu_2w);
  m.chi2 = sample_field(g, [&](const Vec3& x) {
    CVec3 s = CVec3::Zero();
    for (const auto& p : chi2) s += p.value(x) * p.direction;
    return s;
  });
  // the profile must vanish near the boundary; clear round-off tails there
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i)
        if (g.depth(i, j, k) <= 1 && m.chi2[g.index(i, j, k)].norm() < 1e-14)
          m.chi2[g.index(i, j, k)].setZero();
  return m;
}

std::vector<Vec3> ExperimentConfig::xi_grid() const {
  if (!xi_list.empty()) return xi_list;
  return xi_lattice(grid(), xi_mmax);
}

void ExperimentConfig::validate() const {
  if (schema_version != 1) throw ConfigError("schema_version", "unsupported version");
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 4) throw ConfigError("grid.n", "need at least 4 nodes per axis");
    if (!(extent[a] > 0)) throw ConfigError("grid.extent", "must be positive");
  }
  if (!(eps0 > 0)) throw ConfigError("material.eps0", "must be positive");
  if (!(mu0 > 0)) throw ConfigError("material.mu0", "must be positive");
  if (!(omega > 0)) throw ConfigError("omega", "must be positive");
  if (!(norm.p > 3 && norm.p < 6)) throw ConfigError("norm.p", "must lie in (3, 6)");
  if (!(norm.delta > 0.5 && norm.delta < 1)) throw ConfigError("norm.delta", "must lie in (1/2, 1)");
  if (!(solver.tol > 0)) throw ConfigError("solver.tol", "must be positive");
  if (solver.max_iter <= 0) throw ConfigError("solver.max_iter", "must be positive");
  if (solver.restart <= 0) throw ConfigError("solver.restart", "must be positive");
  if (!(solver.resonance_threshold > 0)) throw ConfigError("solver.resonance_threshold", "must be positive");
  if (!(shg.epsilon_ball > 0)) throw ConfigError("shg.epsilon_ball", "must be positive");
  if (!(shg.delta_ball > 0)) throw ConfigError("shg.delta_ball", "must be positive");
  if (!(shg.tol > 0) || !(shg.tol < shg.delta_ball)) throw ConfigError("shg.tol", "must be in (0, delta_ball)");
  if (shg.max_iter <= 0) throw ConfigError("shg.max_iter", "must be positive");
  if (tau.empty()) throw ConfigError("cgo.tau", "need at least one value");
  double kappa = omega * std::sqrt(eps0 * mu0);
  for (double t : tau)
    if (!(t > kappa)) throw ConfigError("cgo.tau", "every tau must be positive and exceed kappa");
  if (variants.size() < 3) throw ConfigError("cgo.variants", "need three variants");
  if (!(cgo.tol > 0)) throw ConfigError("cgo.tol", "must be positive");
  if (!(cgo.p > 3 && cgo.p < 6)) throw ConfigError("cgo.p", "must lie in (3, 6)");
  if (cgo.supercell_factor < 2) throw ConfigError("cgo.supercell_factor", "must be at least 2");
  if (xi_mmax < 1) throw ConfigError("xi.mmax", "must be at least 1");
  for (const auto& x : xi_list)
    if (!(x.norm() > 0)) throw ConfigError("xi.list", "xi = 0 is not allowed");
  if (s_list.size() < 2) throw ConfigError("s_list", "need at least two values");
  for (double s : s_list)
    if (!(s > 0)) throw ConfigError("s_list", "values must be positive");
  if (recon_source != "oracle" && recon_source != "measured")
    throw ConfigError("recon.source", "must be 'oracle' or 'measured'");
  if (cgo_samples <= 0) throw ConfigError("cgo.samples", "must be positive");
  if (!(probe.scale > 0)) throw ConfigError("probe.scale", "must be positive");
  if (output.empty()) throw ConfigError("output", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("<document>", "top level must be a mapping");
  Reader r{"", root};
  ExperimentConfig c;
  if (!r.has("schema_version")) throw ConfigError("schema_version", "missing");
  c.schema_version = r["schema_version"].integer();
  if (r.has("grid")) {
    Reader g = r["grid"];
    if (g.has("n")) {
      if (g["n"].node.IsScalar()) c.n.fill(g["n"].integer());
      else
        for (int a = 0; a < 3; ++a) c.n[a] = g["n"].at(a).integer();
    }
    if (g.has("extent")) c.extent = g["extent"].triple();
    if (g.has("origin")) c.origin = g["origin"].triple();
    else
      for (int a = 0; a < 3; ++a) c.origin[a] = -c.extent[a] / 2;
  }
  if (r.has("material")) {
    Reader m = r["material"];
    if (m.has("eps0")) c.eps0 = m["eps0"].real();
    if (m.has("mu0")) c.mu0 = m["mu0"].real();
    c.eps = {Primitive{}};
    c.eps[0].amplitude = c.eps0;
    c.mu = {Primitive{}};
    c.mu[0].amplitude = c.mu0;
    if (m.has("eps")) c.eps = read_profile(m["eps"], false);
    if (m.has("mu")) c.mu = read_profile(m["mu"], false);
    if (m.has("chi2")) c.chi2 = read_profile(m["chi2"], true);
    if (m.has("eps_2w")) c.eps_2w = read_profile(m["eps_2w"], false);
    if (m.has("mu_2w")) c.mu_2w = read_profile(m["mu_2w"], false);
  }
  if (r.has("omega")) c.omega = r["omega"].real();
  if (r.has("norm")) {
    if (r["norm"].has("p")) c.norm.p = r["norm"]["p"].real();
    if (r["norm"].has("delta")) c.norm.delta = r["norm"]["delta"].real();
  }
  if (r.has("solver")) {
    Reader s = r["solver"];
    if (s.has("tol")) c.solver.tol = s["tol"].real();
    if (s.has("max_iter")) c.solver.max_iter = s["max_iter"].integer();
    if (s.has("restart")) c.solver.restart = s["restart"].integer();
    if (s.has("direct_cutoff")) c.solver.direct_cutoff = s["direct_cutoff"].integer();
    if (s.has("resonance_threshold")) c.solver.resonance_threshold = s["resonance_threshold"].real();
  }
  if (r.has("shg")) {
    Reader s = r["shg"];
    if (s.has("epsilon_ball")) c.shg.epsilon_ball = s["epsilon_ball"].real();
    if (s.has("delta_ball")) c.shg.delta_ball = s["delta_ball"].real();
    if (s.has("tol")) c.shg.tol = s["tol"].real();
    if (s.has("max_iter")) c.shg.max_iter = s["max_iter"].integer();
  }
  c.shg.linear = c.solver;
  if (r.has("cgo")) {
    Reader s = r["cgo"];
    if (s.has("tau")) {
      if (s["tau"].node.IsScalar()) c.tau = {s["tau"].real()};
      else c.tau = s["tau"].reals();
    }
    if (s.has("variants")) {
      c.variants.clear();
      for (std::size_t i = 0; i < s["variants"].size(); ++i) {
        Reader v = s["variants"].at(i);
        try {
          c.variants.push_back(parse_variant(v.str()));
        } catch (const Error&) {
          v.fail("unknown variant");
        }
      }
    }
    if (s.has("tol")) c.cgo.tol = s["tol"].real();
    if (s.has("max_iter")) c.cgo.max_iter = s["max_iter"].integer();
    if (s.has("p")) c.cgo.p = s["p"].real();
    if (s.has("supercell_factor")) c.cgo.supercell_factor = s["supercell_factor"].integer();
    if (s.has("grid_adapt")) c.grid_adapt = s["grid_adapt"].boolean();
    if (s.has("samples")) c.cgo_samples = s["samples"].integer();
  }
  if (r.has("xi")) {
    Reader x = r["xi"];
    if (x.has("mmax")) c.xi_mmax = x["mmax"].integer();
    if (x.has("list"))
      for (std::size_t i = 0; i < x["list"].size(); ++i) c.xi_list.push_back(x["list"].at(i).vec3());
  }
  if (r.has("s_list")) c.s_list = r["s_list"].reals();
  if (r.has("recon") && r["recon"].has("source")) c.recon_source = r["recon"]["source"].str();
  if (r.has("probe")) {
    Reader p = r["probe"];
    if (p.has("zeta_omega")) c.probe.zeta_omega = p["zeta_omega"].cvec3();
    if (p.has("amp_omega")) c.probe.amp_omega = p["amp_omega"].cvec3();
    if (p.has("zeta_2omega")) c.probe.zeta_2omega = p["zeta_2omega"].cvec3();
    if (p.has("amp_2omega")) c.probe.amp_2omega = p["amp_2omega"].cvec3();
    if (p.has("scale")) c.probe.scale = p["scale"].real();
  }
  if (r.has("output")) c.output = r["output"].str();
  if (r.has("seed")) {
    try {
      c.seed = r["seed"].node.as<unsigned long long>();
    } catch (const YAML::Exception&) {
      r["seed"].fail("expected a nonnegative integer");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "schema_version" << YAML::Value << c.schema_version;
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value << YAML::Flow << YAML::BeginSeq << c.n[0] << c.n[1] << c.n[2]
    << YAML::EndSeq;
  e << YAML::Key << "extent" << YAML::Value;
  emit_vec(e, Vec3(c.extent[0], c.extent[1], c.extent[2]));
  e << YAML::Key << "origin" << YAML::Value;
  emit_vec(e, Vec3(c.origin[0], c.origin[1], c.origin[2]));
  e << YAML::EndMap;
  e << YAML::Key << "material" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "eps0" << YAML::Value << c.eps0;
  e << YAML::Key << "mu0" << YAML::Value << c.mu0;
  e << YAML::Key << "eps" << YAML::Value;
  emit_profile(e, c.eps, false);
  e << YAML::Key << "mu" << YAML::Value;
  emit_profile(e, c.mu, false);
  e << YAML::Key << "chi2" << YAML::Value;
  emit_profile(e, c.chi2, true);
  if (c.eps_2w) {
    e << YAML::Key << "eps_2w" << YAML::Value;
    emit_profile(e, *c.eps_2w, false);
  }
  if (c.mu_2w) {
    e << YAML::Key << "mu_2w" << YAML::Value;
    emit_profile(e, *c.mu_2w, false);
  }
  e << YAML::EndMap;
  e << YAML::Key << "omega" << YAML::Value << c.omega;
  e << YAML::Key << "norm" << YAML::Value << YAML::BeginMap << YAML::Key << "p" << YAML::Value
    << c.norm.p << YAML::Key << "delta" << YAML::Value << c.norm.delta << YAML::EndMap;
  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "tol" << YAML::Value << c.solver.tol;
  e << YAML::Key << "max_iter" << YAML::Value << c.solver.max_iter;
  e << YAML::Key << "restart" << YAML::Value << c.solver.restart;
  e << YAML::Key << "direct_cutoff" << YAML::Value << c.solver.direct_cutoff;
  e << YAML::Key << "resonance_threshold" << YAML::Value << c.solver.resonance_threshold;
  e << YAML::EndMap;
  e << YAML::Key << "shg" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "epsilon_ball" << YAML::Value << c.shg.epsilon_ball;
  e << YAML::Key << "delta_ball" << YAML::Value << c.shg.delta_ball;
  e << YAML::Key << "tol" << YAML::Value << c.shg.tol;
  e << YAML::Key << "max_iter" << YAML::Value << c.shg.max_iter;
  e << YAML::EndMap;
  e << YAML::Key << "cgo" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "tau" << YAML::Value << YAML::Flow << c.tau;
  e << YAML::Key << "variants" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto v : c.variants) e << variant_name(v);
  e << YAML::EndSeq;
  e << YAML::Key << "tol" << YAML::Value << c.cgo.tol;
  e << YAML::Key << "max_iter" << YAML::Value << c.cgo.max_iter;
  e << YAML::Key << "p" << YAML::Value << c.cgo.p;
  e << YAML::Key << "supercell_factor" << YAML::Value << c.cgo.supercell_factor;
  e << YAML::Key << "grid_adapt" << YAML::Value << c.grid_adapt;
  e << YAML::Key << "samples" << YAML::Value << c.cgo_samples;
  e << YAML::EndMap;
  e << YAML::Key << "xi" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mmax" << YAML::Value << c.xi_mmax;
  if (!c.xi_list.empty()) {
    e << YAML::Key << "list" << YAML::Value << YAML::BeginSeq;
    for (const auto& x : c.xi_list) emit_vec(e, x);
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
  e << YAML::Key << "s_list" << YAML::Value << YAML::Flow << c.s_list;
  e << YAML::Key << "recon" << YAML::Value << YAML::BeginMap << YAML::Key << "source" << YAML::Value
    << c.recon_source << YAML::EndMap;
  e << YAML::Key << "probe" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "zeta_omega" << YAML::Value;
  emit_cvec(e, c.probe.zeta_omega);
  e << YAML::Key << "amp_omega" << YAML::Value;
  emit_cvec(e, c.probe.amp_omega);
  e << YAML::Key << "zeta_2omega" << YAML::Value;
  emit_cvec(e, c.probe.zeta_2omega);
  e << YAML::Key << "amp_2omega" << YAML::Value;
  emit_cvec(e, c.probe.amp_2omega);
  e << YAML::Key << "scale" << YAML::Value << c.probe.scale;
  e << YAML::EndMap;
  e << YAML::Key << "output" << YAML::Value << c.output;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace shg
