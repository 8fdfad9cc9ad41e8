#include "shg/serialize.hpp"

namespace shg {

using nlohmann::json;

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }
json vjson(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }
json cvjson(const CVec3& v) { return json::array({cjson(v(0)), cjson(v(1)), cjson(v(2))}); }

cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::IoError, "expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(Errc::IoError, "expected a real 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

CVec3 cvec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(Errc::IoError, "expected a complex 3-vector");
  return CVec3(cplx_from_json(j[0]), cplx_from_json(j[1]), cplx_from_json(j[2]));
}

json to_json(const CgoDirectionSet& ds) {
  json frame = json::array();
  for (int c = 0; c < 3; ++c) frame.push_back(vjson(ds.frame.col(c)));
  return {
      {"xi", vjson(ds.xi)},
      {"tau", ds.tau},
      {"kappa", ds.kappa},
      {"variant", variant_name(ds.variant)},
      {"dispersion", ds.mode == Dispersion::Physical ? "physical" : "algebraic"},
      {"eps0", ds.eps0},
      {"mu0", ds.mu0},
      {"frame", frame},
      {"grid_h", vjson(ds.grid_h)},
      {"zeta1_omega", cvjson(ds.zeta1_omega)},
      {"zeta1_2omega", cvjson(ds.zeta1_2omega)},
      {"zetaT_omega", cvjson(ds.zetaT_omega)},
      {"zetaT_2omega", cvjson(ds.zetaT_2omega)},
      {"A1_omega", cvjson(ds.A1_omega)},
      {"A1_2omega", cvjson(ds.A1_2omega)},
      {"AT_omega", cvjson(ds.AT_omega)},
      {"AT_2omega", cvjson(ds.AT_2omega)},
      {"B1_omega", cvjson(ds.B1_omega)},
      {"B1_2omega", cvjson(ds.B1_2omega)},
      {"BT_omega", cvjson(ds.BT_omega)},
      {"BT_2omega", cvjson(ds.BT_2omega)},
  };
}

CgoDirectionSet direction_set_from_json(const json& j) {
  try {
    CgoDirectionSet d;
    d.xi = vec3_from_json(j.at("xi"));
    d.tau = j.at("tau").get<double>();
    d.kappa = j.at("kappa").get<double>();
    d.variant = parse_variant(j.at("variant").get<std::string>());
    std::string mode = j.at("dispersion").get<std::string>();
    if (mode != "physical" && mode != "algebraic") throw Error(Errc::IoError, "unknown dispersion " + mode);
    d.mode = mode == "physical" ? Dispersion::Physical : Dispersion::Algebraic;
    d.eps0 = j.at("eps0").get<double>();
    d.mu0 = j.at("mu0").get<double>();
    for (int c = 0; c < 3; ++c) d.frame.col(c) = vec3_from_json(j.at("frame").at(c));
    d.grid_h = vec3_from_json(j.at("grid_h"));
    d.zeta1_omega = cvec3_from_json(j.at("zeta1_omega"));
    d.zeta1_2omega = cvec3_from_json(j.at("zeta1_2omega"));
    d.zetaT_omega = cvec3_from_json(j.at("zetaT_omega"));
    d.zetaT_2omega = cvec3_from_json(j.at("zetaT_2omega"));
    d.A1_omega = cvec3_from_json(j.at("A1_omega"));
    d.A1_2omega = cvec3_from_json(j.at("A1_2omega"));
    d.AT_omega = cvec3_from_json(j.at("AT_omega"));
    d.AT_2omega = cvec3_from_json(j.at("AT_2omega"));
    d.B1_omega = cvec3_from_json(j.at("B1_omega"));
    d.B1_2omega = cvec3_from_json(j.at("B1_2omega"));
    d.BT_omega = cvec3_from_json(j.at("BT_omega"));
    d.BT_2omega = cvec3_from_json(j.at("BT_2omega"));
    return d;
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, std::string("direction set json: ") + e.what());
  }
}

json to_json(const FourierChiData& d) {
  json modes = json::array();
  for (std::size_t i = 0; i < d.xi.size(); ++i) {
    json m = {{"xi", vjson(d.xi[i])}, {"F", cvjson(d.F[i])}};
    if (i < d.condition.size()) m["condition"] = d.condition[i];
    if (i < d.tau_delta.size()) m["tau_delta"] = d.tau_delta[i];
    modes.push_back(m);
  }
  return modes;
}

FourierChiData fourier_data_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::IoError, "fourier data json must be an array of modes");
  FourierChiData d;
  try {
    for (const auto& m : j) {
      d.xi.push_back(vec3_from_json(m.at("xi")));
      d.F.push_back(cvec3_from_json(m.at("F")));
      d.condition.push_back(m.value("condition", 0.0));
      d.tau_delta.push_back(m.value("tau_delta", 0.0));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, std::string("fourier data json: ") + e.what());
  }
  return d;
}

json to_json(const ReconReport& r) {
  json j = {{"curl_residual", r.curl_residual},
            {"div_residual", r.div_residual},
            {"missing_modes", r.missing_modes},
            {"dc", cvjson(r.dc)},
            {"max_condition", r.max_condition}};
  j["rel_l2_error"] = r.rel_l2_error ? json(*r.rel_l2_error) : json(nullptr);
  return j;
}

}  // namespace shg
