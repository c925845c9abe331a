#pragma once

#include <filesystem>
#include <optional>

#include "nlohmann/json.hpp"

#include "sidewalk/network.hpp"

namespace sidewalk {

struct StoredGraph {
  RoutingGraph graph;
  nlohmann::json coverage;  // null when the file carries no report
};

// {origin, nodes:[{id,lon,lat,elev}], edges:[{id,a,b,kind,length_m,...}],
//  coverage}
nlohmann::json graph_to_json(RoutingGraph const& graph,
                             nlohmann::json const& coverage = nullptr);
StoredGraph graph_from_json(nlohmann::json const& doc);

void save_graph(std::filesystem::path const& path, RoutingGraph const& graph,
                nlohmann::json const& coverage = nullptr);
StoredGraph load_graph(std::filesystem::path const& path);

nlohmann::json edge_properties(GraphEdge const& e);
nlohmann::json edge_feature(RoutingGraph const& graph, GraphEdge const& e);

struct GeoBox {
  GeoPoint min;
  GeoPoint max;
};

// Edges whose geometry touches the box, as a GeoJSON FeatureCollection. No
// box means every edge.
nlohmann::json network_geojson(RoutingGraph const& graph,
                               std::optional<GeoBox> box = std::nullopt);

}  // namespace sidewalk
