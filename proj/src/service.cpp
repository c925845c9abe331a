#include "sidewalk/service.hpp"

#include <cmath>
#include <sstream>

#include "httplib.h"

#include "sidewalk/graph_io.hpp"
#include "sidewalk/ingest.hpp"

namespace sidewalk {

namespace {

// Snaps further than this produce a warning in the response.
constexpr double kFarSnapWarning = 25.0;

GeoPoint parse_waypoint(nlohmann::json const& j, std::string const& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw BadRequest(field, "'" + field + "' must be [lon, lat]");
  }
  GeoPoint const p{j[0].get<double>(), j[1].get<double>()};
  try {
    validate_wgs84(p);
  } catch (Error const& e) {
    throw BadRequest(field, "'" + field + "': " + e.what());
  }
  return p;
}

nlohmann::json error_body(std::string const& code, std::string const& message) {
  return {{"status", "error"}, {"error", code}, {"message", message}};
}

nlohmann::json route_geometry(RoutingGraph const& graph, Route const& route) {
  auto coords = nlohmann::json::array();
  auto const push = [&](LocalPoint p) {
    auto const g = graph.projection().unproject(p);
    coords.push_back({g.lon, g.lat});
  };
  push(graph.node(route.nodes.front()).location);
  for (auto const& leg : route.legs) {
    auto const pts = graph.edge(leg.edge).geometry.points();
    if (leg.forward) {
      for (std::size_t i = 1; i < pts.size(); ++i) push(pts[i]);
    } else {
      for (std::size_t i = pts.size() - 1; i-- > 0;) push(pts[i]);
    }
  }
  return coords;
}

std::vector<double> parse_bbox(std::string const& text) {
  std::vector<double> v;
  std::stringstream ss{text};
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (std::exception const&) {
      throw BadRequest("bbox", "bbox value '" + tok + "' is not a number");
    }
  }
  if (v.size() != 4) {
    throw BadRequest("bbox", "bbox must be minlon,minlat,maxlon,maxlat");
  }
  for (auto const x : v) {
    if (!std::isfinite(x)) throw BadRequest("bbox", "bbox values must be finite");
  }
  if (v[0] > v[2] || v[1] > v[3]) {
    throw BadRequest("bbox", "bbox minimum exceeds maximum");
  }
  return v;
}

}  // namespace

RouteRequest parse_route_request(nlohmann::json const& j) {
  if (!j.is_object()) {
    throw BadRequest("", "request body must be a JSON object");
  }
  for (auto const& [k, v] : j.items()) {
    if (k != "origin" && k != "destination" && k != "profile" && k != "query_date" &&
        k != "snap_radius_m") {
      throw BadRequest(k, "unknown request field '" + k + "'");
    }
  }
  for (auto const* f : {"origin", "destination"}) {
    if (!j.contains(f)) throw BadRequest(f, std::string{"missing field '"} + f + "'");
  }
  RouteRequest r;
  r.origin = parse_waypoint(j["origin"], "origin");
  r.destination = parse_waypoint(j["destination"], "destination");

  auto const profile = j.value("profile", nlohmann::json("default"));
  if (profile.is_string()) {
    auto const preset = preset_profile(profile.get<std::string>());
    if (!preset) {
      throw BadRequest("profile", "unknown profile preset '" + profile.get<std::string>() + "'");
    }
    r.profile = *preset;
  } else {
    try {
      r.profile = profile_from_json(profile);
    } catch (ParameterError const& e) {
      throw BadRequest("profile", e.what());
    }
  }

  if (j.contains("query_date") && !j["query_date"].is_null()) {
    if (!j["query_date"].is_string()) {
      throw BadRequest("query_date", "'query_date' must be a YYYY-MM-DD string");
    }
    try {
      r.query_date = parse_date(j["query_date"].get<std::string>());
    } catch (FormatError const& e) {
      throw BadRequest("query_date", e.what());
    }
  }
  if (j.contains("snap_radius_m")) {
    auto const& s = j["snap_radius_m"];
    if (!s.is_number() || !(s.get<double>() > 0.0) || !std::isfinite(s.get<double>())) {
      throw BadRequest("snap_radius_m", "'snap_radius_m' must be a positive number");
    }
    r.snap_radius = s.get<double>();
  }
  return r;
}

HttpResult handle_route(RoutingGraph const& graph, RouteRequest const& request,
                        Date const today) {
  auto profile = request.profile;
  if (request.query_date) {
    profile.query_date = request.query_date;
  } else if (!profile.query_date) {
    profile.query_date = today;
  }

  std::size_t from = 0;
  std::size_t to = 0;
  for (auto const which : {0, 1}) {
    auto const field = which == 0 ? "origin" : "destination";
    try {
      (which == 0 ? from : to) = snap(
          graph, which == 0 ? request.origin : request.destination, request.snap_radius);
    } catch (UnroutableWaypointError const& e) {
      auto body = error_body("unroutable_waypoint", std::string{field} + ": " + e.what());
      body["field"] = field;
      body["nearest_distance_m"] = std::isfinite(e.nearest_distance())
                                       ? nlohmann::json(e.nearest_distance())
                                       : nlohmann::json(nullptr);
      return {422, std::move(body)};
    }
  }

  Route route;
  try {
    route = shortest_path(graph, profile, from, to);
  } catch (NoRouteError const& e) {
    auto body = error_body("no_route", e.what());
    auto binding = nlohmann::json::array();
    for (auto const c : e.binding()) binding.push_back(to_string(c));
    body["binding_constraints"] = std::move(binding);
    return {404, std::move(body)};
  }

  auto const steps = build_directions(route, graph);
  auto steps_json = nlohmann::json::array();
  for (auto const& s : steps) {
    steps_json.push_back({{"instruction", s.instruction},
                          {"maneuver", to_string(s.maneuver)},
                          {"length_m", s.length},
                          {"edge_ids", s.edges}});
  }

  auto warnings = nlohmann::json::array();
  auto edges = nlohmann::json::array();
  for (auto const& leg : route.legs) {
    auto const& e = graph.edge(leg.edge);
    edges.push_back({{"id", e.id},
                     {"direction", leg.forward ? "forward" : "backward"},
                     {"cost", leg.cost}});
    if (e.kind == EdgeKind::crossing && !(e.curb_ramp_a && e.curb_ramp_b)) {
      warnings.push_back("crossing edge " + std::to_string(e.id) + " lacks a curb ramp");
    }
    for (auto const& c : e.construction) {
      if (c.contains(*profile.query_date)) {
        warnings.push_back("edge " + std::to_string(e.id) + " has active construction");
        break;
      }
    }
  }
  auto const o = graph.projection().project(request.origin);
  auto const d = graph.projection().project(request.destination);
  auto const snap_o = distance(o, graph.node(from).location);
  auto const snap_d = distance(d, graph.node(to).location);
  if (snap_o > kFarSnapWarning) warnings.push_back("origin snapped more than 25 m");
  if (snap_d > kFarSnapWarning) warnings.push_back("destination snapped more than 25 m");

  auto elevation = nlohmann::json::array();
  for (std::size_t i = 0; i < route.nodes.size(); ++i) {
    elevation.push_back({{"node", route.nodes[i]},
                         {"distance_m", route.cumulative_distance[i]},
                         {"elevation_m", route.elevation[i]}});
  }

  nlohmann::json body = {{"status", "ok"},
                         {"profile", to_json(profile)},
                         {"origin_node", from},
                         {"destination_node", to},
                         {"snap_distance_m", {{"origin", snap_o}, {"destination", snap_d}}},
                         {"geometry", route_geometry(graph, route)},
                         {"steps", std::move(steps_json)},
                         {"total_length_m", route.total_length},
                         {"total_cost", route.total_cost},
                         {"max_grade", route.max_grade},
                         {"nodes", route.nodes},
                         {"edges", std::move(edges)},
                         {"elevation_profile", std::move(elevation)},
                         {"warnings", std::move(warnings)}};
  return {200, std::move(body)};
}

HttpResult handle_route(RoutingGraph const& graph, std::string const& body, Date const today) {
  try {
    auto const j = nlohmann::json::parse(body);
    return handle_route(graph, parse_route_request(j), today);
  } catch (nlohmann::json::parse_error const& e) {
    auto out = error_body("bad_request", std::string{"request is not valid JSON: "} + e.what());
    out["field"] = "";
    return {400, std::move(out)};
  } catch (BadRequest const& e) {
    auto out = error_body("bad_request", e.what());
    out["field"] = e.field();
    return {400, std::move(out)};
  }
}

HttpResult handle_network(RoutingGraph const& graph, std::optional<std::string> const& bbox) {
  if (!bbox) {
    return {200, network_geojson(graph)};
  }
  try {
    auto const v = parse_bbox(*bbox);
    return {200, network_geojson(graph, GeoBox{{v[0], v[1]}, {v[2], v[3]}})};
  } catch (BadRequest const& e) {
    auto out = error_body("bad_request", e.what());
    out["field"] = e.field();
    return {400, std::move(out)};
  }
}

HttpResult handle_profiles() {
  auto list = nlohmann::json::array();
  for (auto const& p : preset_profiles()) list.push_back(to_json(p));
  return {200, std::move(list)};
}

HttpResult handle_health(RoutingGraph const& graph) {
  return {200,
          {{"status", "ok"}, {"nodes", graph.nodes().size()}, {"edges", graph.edges().size()}}};
}

struct RouteServer::Impl {
  std::shared_ptr<RoutingGraph const> graph;
  httplib::Server server;
};

RouteServer::RouteServer(std::shared_ptr<RoutingGraph const> graph)
    : impl_(std::make_unique<Impl>()) {
  impl_->graph = std::move(graph);
  auto& srv = impl_->server;
  auto const* g = impl_->graph.get();

  auto const reply = [](httplib::Response& res, HttpResult const& r) {
    res.status = r.status;
    res.set_content(r.text(), "application/json");
  };

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/.*)", [](httplib::Request const&, httplib::Response& res) {
    res.status = 204;
  });
  srv.Post("/route", [g, reply](httplib::Request const& req, httplib::Response& res) {
    reply(res, handle_route(*g, req.body, today_utc()));
  });
  srv.Get("/network", [g, reply](httplib::Request const& req, httplib::Response& res) {
    std::optional<std::string> bbox;
    if (req.has_param("bbox")) bbox = req.get_param_value("bbox");
    reply(res, handle_network(*g, bbox));
  });
  srv.Get("/profiles", [reply](httplib::Request const&, httplib::Response& res) {
    reply(res, handle_profiles());
  });
  srv.Get("/health", [g, reply](httplib::Request const&, httplib::Response& res) {
    reply(res, handle_health(*g));
  });
}

RouteServer::~RouteServer() { stop(); }

int RouteServer::bind(std::string const& host, int const port) {
  if (port == 0) {
    return impl_->server.bind_to_any_port(host);
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void RouteServer::listen() { impl_->server.listen_after_bind(); }

void RouteServer::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
}

}  // namespace sidewalk
