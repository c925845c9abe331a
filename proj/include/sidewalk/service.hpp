#pragma once

#include <memory>
#include <optional>
#include <string>

#include "nlohmann/json.hpp"

#include "sidewalk/date.hpp"
#include "sidewalk/network.hpp"
#include "sidewalk/router.hpp"

namespace sidewalk {

// Coordinates are always [lon, lat] (GeoJSON order).
struct RouteRequest {
  GeoPoint origin;
  GeoPoint destination;
  CostProfile profile;
  std::optional<Date> query_date;
  double snap_radius = 100.0;
};

struct HttpResult {
  int status = 200;
  nlohmann::json body;

  // Exact response text; the CLI prints the same bytes.
  std::string text() const { return body.dump(2) + "\n"; }
};

class BadRequest : public Error {
 public:
  BadRequest(std::string const& field, std::string const& what)
      : Error(what), field_(field) {}
  std::string const& field() const { return field_; }

 private:
  std::string field_;
};

RouteRequest parse_route_request(nlohmann::json const& j);

// Route a parsed request. `today` fills a missing query date.
HttpResult handle_route(RoutingGraph const& graph, RouteRequest const& request,
                        Date today);
HttpResult handle_route(RoutingGraph const& graph, std::string const& body, Date today);

HttpResult handle_network(RoutingGraph const& graph,
                          std::optional<std::string> const& bbox);
HttpResult handle_profiles();
HttpResult handle_health(RoutingGraph const& graph);

// HTTP front end over a shared, read-only graph. Requests run concurrently on
// the server's worker pool.
class RouteServer {
 public:
  explicit RouteServer(std::shared_ptr<RoutingGraph const> graph);
  ~RouteServer();
  RouteServer(RouteServer const&) = delete;
  RouteServer& operator=(RouteServer const&) = delete;

  // port 0 picks a free port. Returns the bound port.
  int bind(std::string const& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sidewalk
