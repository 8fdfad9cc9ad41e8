#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shg/admittance.hpp"
#include "shg/cgo.hpp"
#include "shg/linear.hpp"
#include "shg/nonlinear.hpp"

namespace shg {

// Raised for malformed or invalid configuration; `field` is the dotted key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& msg, int line = -1)
      : Error(Errc::InvalidConfig, field + (line >= 0 ? " (line " + std::to_string(line) + ")" : "") +
                                       ": " + msg),
        field_(field),
        line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

// One analytic term of a material profile; profiles are sums of terms.
struct Primitive {
  std::string type = "constant";  // constant | gaussian | box
  cplx amplitude = 1.0;
  Vec3 center = Vec3::Zero();
  double sigma = 0.1;
  double cutoff = 0;  // gaussian: smooth cutoff radius, 0 = none
  Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
  double width = 0.02;  // box edge smoothing
  CVec3 direction = CVec3(1, 0, 0);  // chi2 only

  cplx value(const Vec3& x) const;
};

struct ProbeSpec {
  // tangential traces of e^{zeta.(x - x_c)} A for each channel; zero amplitude disables
  CVec3 zeta_omega = CVec3(0, 0, 0), amp_omega = CVec3(0, 0, 0);
  CVec3 zeta_2omega = CVec3(0, 0, 0), amp_2omega = CVec3(0, 0, 0);
  double scale = 1.0;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::array<int, 3> n{16, 16, 16};
  std::array<double, 3> extent{1, 1, 1};
  std::array<double, 3> origin{-0.5, -0.5, -0.5};
  double eps0 = 1, mu0 = 1;
  std::vector<Primitive> eps{Primitive{}}, mu{Primitive{}}, chi2;
  std::optional<std::vector<Primitive>> eps_2w, mu_2w;
  double omega = 1.0;
  NormExponent norm;
  LinearSolverOptions solver;
  ShgSolveOptions shg;
  std::vector<double> tau{20, 40, 80};
  std::vector<Variant> variants{Variant::V1, Variant::V2, Variant::V3};
  CgoOptions cgo;
  bool grid_adapt = true;
  int xi_mmax = 2;
  std::vector<Vec3> xi_list;  // overrides the lattice when nonempty
  std::vector<double> s_list{1e-2, 5e-3};
  std::string recon_source = "oracle";  // oracle | measured
  int cgo_samples = 100;
  ProbeSpec probe;
  std::string output = "out";
  unsigned long long seed = 0;

  BoxGrid grid() const;
  MaterialModel material() const;
  std::vector<Vec3> xi_grid() const;
  // throws ConfigError naming the offending field
  void validate() const;
};

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

}  // namespace shg
