#pragma once

#include "json.hpp"
#include "shg/cgo.hpp"
#include "shg/recon.hpp"

namespace shg {

// Complex numbers are [re, im] pairs throughout.
nlohmann::json cjson(cplx z);
nlohmann::json vjson(const Vec3& v);
nlohmann::json cvjson(const CVec3& v);
cplx cplx_from_json(const nlohmann::json& j);
Vec3 vec3_from_json(const nlohmann::json& j);
CVec3 cvec3_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CgoDirectionSet& ds);
CgoDirectionSet direction_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FourierChiData& d);
FourierChiData fourier_data_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReconReport& r);

}  // namespace shg
