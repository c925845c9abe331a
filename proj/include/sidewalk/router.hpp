#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "sidewalk/date.hpp"
#include "sidewalk/error.hpp"
#include "sidewalk/network.hpp"

namespace sidewalk {

// Additive penalty; `hard` removes the edge instead of charging `value`.
struct Penalty {
  double value = 0.0;
  bool hard = false;

  friend bool operator==(Penalty const&, Penalty const&) = default;
};

struct CostProfile {
  std::string name = "custom";
  double w_distance = 1.0;
  double grade_ideal = 0.02;
  double grade_max = 0.0833;  // 1:12
  double w_grade = 0.0;
  bool require_curb_ramps = false;
  Penalty ramp_penalty;
  bool avoid_construction = false;
  Penalty construction_penalty;
  std::optional<Date> query_date;  // construction is ignored without a date

  // Throws ParameterError when an invariant does not hold.
  void validate() const;

  // Multiplies the distance weight and both additive penalties by k. w_grade
  // is a dimensionless multiplier on distance and is left unchanged, so every
  // finite edge cost scales by exactly k.
  CostProfile scaled(double k) const;

  friend bool operator==(CostProfile const&, CostProfile const&) = default;
};

CostProfile profile_from_json(nlohmann::json const& j);
nlohmann::json to_json(CostProfile const& p);

std::vector<CostProfile> preset_profiles();
std::optional<CostProfile> preset_profile(std::string_view name);

// Constraint classes that can remove an edge from the search.
enum class Constraint { grade, curb_ramps, construction };
std::string_view to_string(Constraint c);

struct Relaxation {
  bool grade = false;
  bool curb_ramps = false;
  bool construction = false;
};

// Cost of traversing `edge` a->b (forward) or b->a; nullopt means EXCLUDED.
std::optional<double> edge_cost(GraphEdge const& edge, bool forward,
                                CostProfile const& profile,
                                Relaxation relax = {});

class UnroutableWaypointError : public Error {
 public:
  UnroutableWaypointError(std::string const& what, double nearest_distance)
      : Error(what), nearest_distance_(nearest_distance) {}
  double nearest_distance() const { return nearest_distance_; }

 private:
  double nearest_distance_;
};

class NoRouteError : public Error {
 public:
  NoRouteError(std::string const& what, std::vector<Constraint> binding)
      : Error(what), binding_(std::move(binding)) {}
  // Constraints whose relaxation alone reconnects the pair; empty when the
  // graph itself is disconnected or only a combination would help.
  std::vector<Constraint> const& binding() const { return binding_; }

 private:
  std::vector<Constraint> binding_;
};

// Nearest node within radius, ties to the lowest id.
std::size_t snap(RoutingGraph const& graph, GeoPoint p, double radius = 100.0);

struct RouteLeg {
  std::size_t edge = 0;
  bool forward = true;
  double cost = 0.0;
};

struct Route {
  std::vector<std::size_t> nodes;
  std::vector<RouteLeg> legs;
  double total_cost = 0.0;
  double total_length = 0.0;
  double max_grade = 0.0;
  std::vector<double> cumulative_distance;  // per node
  std::vector<double> elevation;            // per node
};

// Dijkstra over nonnegative edge costs. Equal-cost paths resolve to the
// lexicographically smallest node-id sequence.
Route shortest_path(RoutingGraph const& graph, CostProfile const& profile,
                    std::size_t origin, std::size_t destination);

// Builds a Route (totals, profile) from an explicit leg sequence.
Route make_route(RoutingGraph const& graph, std::size_t origin,
                 std::vector<RouteLeg> legs);

enum class Maneuver { depart, continue_on, turn_left, turn_right, cross_street, arrive };
std::string_view to_string(Maneuver m);

struct Step {
  std::string instruction;
  Maneuver maneuver = Maneuver::depart;
  double length = 0.0;
  std::vector<std::size_t> edges;
};

// Bearing change at a node that starts a turn step, degrees.
inline constexpr double kTurnThreshold = 30.0;

std::vector<Step> build_directions(Route const& route, RoutingGraph const& graph);

}  // namespace sidewalk
