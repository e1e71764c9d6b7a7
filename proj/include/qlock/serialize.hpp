#pragma once

// Operator JSON format:
//   {"dims": [...], "party": ["A", ...], "re": [row-major], "im": [row-major]}

#include <nlohmann/json.hpp>

#include "qlock/densop.hpp"

namespace qlock {

nlohmann::json to_json(const HermitianOperator& x);
HermitianOperator hermitian_from_json(const nlohmann::json& j);
DensityOperator density_from_json(const nlohmann::json& j);

}  // namespace qlock
