#include "sidewalk/graph_io.hpp"

#include <algorithm>

#include "sidewalk/error.hpp"
#include "sidewalk/ingest.hpp"

namespace sidewalk {

namespace {

nlohmann::json coords_of(RoutingGraph const& graph, Polyline const& line) {
  auto out = nlohmann::json::array();
  for (auto const p : line.points()) {
    auto const g = graph.projection().unproject(p);
    out.push_back({g.lon, g.lat});
  }
  return out;
}

template <typename T>
T required(nlohmann::json const& obj, char const* key, std::string const& where) {
  auto const it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(where + ": missing '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (nlohmann::json::exception const&) {
    throw SchemaError(where + ": '" + key + "' has the wrong type");
  }
}

bool segment_touches_box(GeoPoint a, GeoPoint b, GeoBox const& box) {
  auto const inside = [&](GeoPoint p) {
    return p.lon >= box.min.lon && p.lon <= box.max.lon && p.lat >= box.min.lat &&
           p.lat <= box.max.lat;
  };
  if (inside(a) || inside(b)) {
    return true;
  }
  // Treat lon/lat as planar: the projection is affine, so straight edges stay
  // straight.
  auto const lp = [](GeoPoint g) { return LocalPoint{g.lon, g.lat}; };
  LocalPoint const c[4] = {{box.min.lon, box.min.lat},
                           {box.max.lon, box.min.lat},
                           {box.max.lon, box.max.lat},
                           {box.min.lon, box.max.lat}};
  for (int i = 0; i < 4; ++i) {
    auto const p = c[i];
    auto const q = c[(i + 1) % 4];
    if (p == q) {
      if (point_segment_distance(p, lp(a), lp(b)) == 0.0) return true;
      continue;
    }
    if (segment_intersection(lp(a), lp(b), p, q)) {
      return true;
    }
  }
  return false;
}

}  // namespace

nlohmann::json edge_properties(GraphEdge const& e) {
  auto construction = nlohmann::json::array();
  for (auto const& c : e.construction) {
    construction.push_back({{"start", format_date(c.start)}, {"end", format_date(c.end)}});
  }
  return {{"id", e.id},
          {"a", e.a},
          {"b", e.b},
          {"kind", to_string(e.kind)},
          {"length_m", e.length},
          {"elev_delta_m", e.elev_delta},
          {"grade", e.grade},
          {"curb_ramp_a", e.curb_ramp_a},
          {"curb_ramp_b", e.curb_ramp_b},
          {"crossed_street", e.crossed_street ? nlohmann::json(*e.crossed_street)
                                              : nlohmann::json(nullptr)},
          {"construction", std::move(construction)},
          {"source_id", e.source_id}};
}

nlohmann::json edge_feature(RoutingGraph const& graph, GraphEdge const& e) {
  return {{"type", "Feature"},
          {"id", e.id},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords_of(graph, e.geometry)}}},
          {"properties", edge_properties(e)}};
}

nlohmann::json graph_to_json(RoutingGraph const& graph, nlohmann::json const& coverage) {
  auto nodes = nlohmann::json::array();
  for (auto const& n : graph.nodes()) {
    auto const g = graph.projection().unproject(n.location);
    nodes.push_back({{"id", n.id}, {"lon", g.lon}, {"lat", g.lat}, {"elev", n.elevation}});
  }
  auto edges = nlohmann::json::array();
  for (auto const& e : graph.edges()) {
    auto j = edge_properties(e);
    j["geometry"] = coords_of(graph, e.geometry);
    edges.push_back(std::move(j));
  }
  auto const o = graph.projection().origin();
  return {{"origin", {{"lon", o.lon}, {"lat", o.lat}}},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"coverage", coverage}};
}

StoredGraph graph_from_json(nlohmann::json const& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") ||
      !doc["nodes"].is_array() || !doc["edges"].is_array()) {
    throw SchemaError("graph document needs 'nodes' and 'edges' arrays");
  }
  GeoPoint origin;
  if (doc.contains("origin") && doc["origin"].is_object()) {
    origin = {required<double>(doc["origin"], "lon", "origin"),
              required<double>(doc["origin"], "lat", "origin")};
  } else {
    if (doc["nodes"].empty()) {
      throw EmptyDatasetError("graph document has no nodes and no origin");
    }
    auto lo = GeoPoint{180, 90};
    auto hi = GeoPoint{-180, -90};
    for (auto const& n : doc["nodes"]) {
      auto const lon = required<double>(n, "lon", "node");
      auto const lat = required<double>(n, "lat", "node");
      lo = {std::min(lo.lon, lon), std::min(lo.lat, lat)};
      hi = {std::max(hi.lon, lon), std::max(hi.lat, lat)};
    }
    origin = {0.5 * (lo.lon + hi.lon), 0.5 * (lo.lat + hi.lat)};
  }
  Projection const projection{origin};

  std::vector<GraphNode> nodes;
  for (auto const& n : doc["nodes"]) {
    auto const id = required<std::size_t>(n, "id", "node");
    auto const where = "node " + std::to_string(id);
    nodes.push_back({id,
                     projection.project({required<double>(n, "lon", where),
                                         required<double>(n, "lat", where)}),
                     n.contains("elev") && n["elev"].is_number() ? n["elev"].get<double>() : 0.0});
  }
  std::vector<GraphEdge> edges;
  for (auto const& j : doc["edges"]) {
    auto const id = required<std::size_t>(j, "id", "edge");
    auto const where = "edge " + std::to_string(id);
    GraphEdge e;
    e.id = id;
    e.a = required<std::size_t>(j, "a", where);
    e.b = required<std::size_t>(j, "b", where);
    e.kind = edge_kind_from_string(required<std::string>(j, "kind", where));
    e.length = required<double>(j, "length_m", where);
    e.elev_delta = required<double>(j, "elev_delta_m", where);
    e.grade = required<double>(j, "grade", where);
    e.curb_ramp_a = j.value("curb_ramp_a", false);
    e.curb_ramp_b = j.value("curb_ramp_b", false);
    if (j.contains("crossed_street") && j["crossed_street"].is_string()) {
      e.crossed_street = j["crossed_street"].get<std::string>();
    }
    for (auto const& c : j.value("construction", nlohmann::json::array())) {
      e.construction.push_back({parse_date(required<std::string>(c, "start", where)),
                                parse_date(required<std::string>(c, "end", where))});
    }
    e.source_id = j.value("source_id", std::string{});
    std::vector<LocalPoint> pts;
    for (auto const& c : required<nlohmann::json>(j, "geometry", where)) {
      pts.push_back(projection.project({c.at(0).get<double>(), c.at(1).get<double>()}));
    }
    auto line = Polyline::cleaned(std::move(pts));
    if (!line) {
      throw SchemaError(where + ": degenerate geometry");
    }
    e.geometry = *std::move(line);
    if (!(e.length > 0.0) || e.grade < 0.0) {
      throw SchemaError(where + ": length must be positive and grade nonnegative");
    }
    edges.push_back(std::move(e));
  }
  return {RoutingGraph{projection, std::move(nodes), std::move(edges)},
          doc.value("coverage", nlohmann::json(nullptr))};
}

void save_graph(std::filesystem::path const& path, RoutingGraph const& graph,
                nlohmann::json const& coverage) {
  write_json_file(path, graph_to_json(graph, coverage));
}

StoredGraph load_graph(std::filesystem::path const& path) {
  return graph_from_json(read_json_file(path));
}

nlohmann::json network_geojson(RoutingGraph const& graph, std::optional<GeoBox> const box) {
  auto features = nlohmann::json::array();
  for (auto const& e : graph.edges()) {
    if (box) {
      auto const pts = e.geometry.points();
      auto hit = false;
      for (std::size_t i = 0; i + 1 < pts.size() && !hit; ++i) {
        hit = segment_touches_box(graph.projection().unproject(pts[i]),
                                  graph.projection().unproject(pts[i + 1]), *box);
      }
      if (!hit) continue;
    }
    features.push_back(edge_feature(graph, e));
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace sidewalk
