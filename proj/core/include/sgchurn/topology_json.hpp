#pragma once

#include <nlohmann/json.hpp>

#include "sgchurn/overlay.hpp"

namespace sgchurn {

// {"capacity": n, "rngSeed": s, "nodes": [{"numId", "nameId", "coords": [x, y]}, ...]}
// Node addresses are implied by array position.
nlohmann::json topology_to_json(const TopologySnapshot& snapshot);
TopologySnapshot topology_from_json(const nlohmann::json& doc);

}  // namespace sgchurn
