#pragma once

#include <json.hpp>

#include "trouter/nn.hpp"

namespace trouter::nn {

nlohmann::json linear_to_json(const Linear& layer);
Linear linear_from_json(const nlohmann::json& doc);

nlohmann::json mlp_to_json(const Mlp2& mlp);
Mlp2 mlp_from_json(const nlohmann::json& doc);

}  // namespace trouter::nn
