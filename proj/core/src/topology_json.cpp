#include "sgchurn/topology_json.hpp"

namespace sgchurn {

nlohmann::json topology_to_json(const TopologySnapshot& snapshot) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : snapshot.nodes) {
    nodes.push_back({{"numId", n.numId}, {"nameId", n.nameId.to_string()}, {"coords", {n.coords.x, n.coords.y}}});
  }
  return {{"capacity", snapshot.capacity}, {"rngSeed", snapshot.rngSeed}, {"nodes", std::move(nodes)}};
}

TopologySnapshot topology_from_json(const nlohmann::json& doc) {
  TopologySnapshot snap;
  snap.capacity = doc.at("capacity").get<std::size_t>();
  snap.rngSeed = doc.at("rngSeed").get<std::uint64_t>();
  const auto& nodes = doc.at("nodes");
  snap.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    NodeIdentity id;
    id.address = address_at(i);
    id.numId = n.at("numId").get<NumId>();
    id.nameId = NameId::from_string(n.at("nameId").get<std::string>());
    id.coords = {n.at("coords").at(0).get<double>(), n.at("coords").at(1).get<double>()};
    snap.nodes.push_back(id);
  }
  return snap;
}

}  // namespace sgchurn
