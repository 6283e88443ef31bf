#pragma once

#include "freeconv/cumulants.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace freeconv {

// Spec tables exchanged by the CLI:
//   {"kind": "cumulant", "entries": [{"word": "X1 X1*", "value": "t"}, ...]}
// Values use the scalar sub-grammar (rationals, t, exp(k*t/2), + - *).

nlohmann::json spec_to_json(const CumulantSpec& spec);
nlohmann::json spec_to_json(const LogCumulantSpec& spec);
nlohmann::json spec_to_json(const MomentFunctional& spec);

CumulantSpec cumulant_spec_from_json(const nlohmann::json& j);
LogCumulantSpec logcumulant_spec_from_json(const nlohmann::json& j);
MomentFunctional moment_functional_from_json(const nlohmann::json& j);

Scalar parse_scalar(const std::string& text);

}  // namespace freeconv
