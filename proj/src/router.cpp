#include "sidewalk/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace sidewalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Penalty penalty_from_json(nlohmann::json const& j, char const* key) {
  if (j.is_string() && j.get<std::string>() == "hard") {
    return {0.0, true};
  }
  if (j.is_number()) {
    return {j.get<double>(), false};
  }
  throw ParameterError(std::string{"profile field '"} + key +
                       "' must be a number or \"hard\"");
}

nlohmann::json penalty_to_json(Penalty const& p) {
  return p.hard ? nlohmann::json("hard") : nlohmann::json(p.value);
}

template <typename T>
T field(nlohmann::json const& j, char const* key) {
  auto const it = j.find(key);
  if (it == j.end()) {
    throw ParameterError(std::string{"profile is missing field '"} + key + "'");
  }
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) {
      throw ParameterError(std::string{"profile field '"} + key + "' must be a boolean");
    }
  } else {
    if (!it->is_number()) {
      throw ParameterError(std::string{"profile field '"} + key + "' must be a number");
    }
  }
  return it->get<T>();
}

struct Label {
  double cost;
  std::size_t node;
  bool operator>(Label const& o) const {
    return cost != o.cost ? cost > o.cost : node > o.node;
  }
};

std::vector<std::size_t> path_to(std::vector<std::optional<std::size_t>> const& parent_node,
                                 std::size_t v) {
  std::vector<std::size_t> out{v};
  while (parent_node[v]) {
    v = *parent_node[v];
    out.push_back(v);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool reachable(RoutingGraph const& graph, CostProfile const& profile,
               Relaxation const relax, std::size_t origin, std::size_t destination) {
  std::vector<bool> seen(graph.nodes().size(), false);
  std::vector<std::size_t> stack{origin};
  seen[origin] = true;
  while (!stack.empty()) {
    auto const u = stack.back();
    stack.pop_back();
    if (u == destination) return true;
    for (auto const& adj : graph.adjacent(u)) {
      if (seen[adj.other]) continue;
      if (!edge_cost(graph.edge(adj.edge), adj.forward, profile, relax)) continue;
      seen[adj.other] = true;
      stack.push_back(adj.other);
    }
  }
  return false;
}

}  // namespace

void CostProfile::validate() const {
  auto const check = [](double v, char const* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ParameterError(std::string{"profile field '"} + name +
                           "' must be finite and nonnegative");
    }
  };
  check(w_distance, "w_distance");
  check(w_grade, "w_grade");
  check(grade_ideal, "grade_ideal");
  check(grade_max, "grade_max");
  check(ramp_penalty.value, "ramp_penalty");
  check(construction_penalty.value, "construction_penalty");
  if (!(grade_ideal < grade_max)) {
    throw ParameterError("profile requires grade_ideal < grade_max");
  }
}

CostProfile CostProfile::scaled(double const k) const {
  auto p = *this;
  p.w_distance *= k;
  p.ramp_penalty.value *= k;
  p.construction_penalty.value *= k;
  return p;
}

CostProfile profile_from_json(nlohmann::json const& j) {
  if (!j.is_object()) {
    throw ParameterError("profile must be a JSON object");
  }
  static constexpr char const* known[] = {
      "name", "w_distance", "grade_ideal", "grade_max", "w_grade", "require_curb_ramps",
      "ramp_penalty", "avoid_construction", "construction_penalty", "query_date"};
  for (auto const& [k, v] : j.items()) {
    if (std::find(std::begin(known), std::end(known), k) == std::end(known)) {
      throw ParameterError("unknown profile field '" + k + "'");
    }
  }
  CostProfile p;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParameterError("profile field 'name' must be a string");
    p.name = j["name"].get<std::string>();
  }
  p.w_distance = field<double>(j, "w_distance");
  p.grade_ideal = field<double>(j, "grade_ideal");
  p.grade_max = field<double>(j, "grade_max");
  p.w_grade = field<double>(j, "w_grade");
  p.require_curb_ramps = field<bool>(j, "require_curb_ramps");
  if (!j.contains("ramp_penalty")) throw ParameterError("profile is missing field 'ramp_penalty'");
  p.ramp_penalty = penalty_from_json(j["ramp_penalty"], "ramp_penalty");
  p.avoid_construction = field<bool>(j, "avoid_construction");
  if (!j.contains("construction_penalty")) {
    throw ParameterError("profile is missing field 'construction_penalty'");
  }
  p.construction_penalty = penalty_from_json(j["construction_penalty"], "construction_penalty");
  if (j.contains("query_date") && !j["query_date"].is_null()) {
    if (!j["query_date"].is_string()) {
      throw ParameterError("profile field 'query_date' must be a YYYY-MM-DD string");
    }
    try {
      p.query_date = parse_date(j["query_date"].get<std::string>());
    } catch (FormatError const& e) {
      throw ParameterError(std::string{"profile field 'query_date': "} + e.what());
    }
  }
  p.validate();
  return p;
}

nlohmann::json to_json(CostProfile const& p) {
  return {{"name", p.name},
          {"w_distance", p.w_distance},
          {"grade_ideal", p.grade_ideal},
          {"grade_max", p.grade_max},
          {"w_grade", p.w_grade},
          {"require_curb_ramps", p.require_curb_ramps},
          {"ramp_penalty", penalty_to_json(p.ramp_penalty)},
          {"avoid_construction", p.avoid_construction},
          {"construction_penalty", penalty_to_json(p.construction_penalty)},
          {"query_date", p.query_date ? nlohmann::json(format_date(*p.query_date))
                                      : nlohmann::json(nullptr)}};
}

// Preset weights are placeholders pending user studies.
std::vector<CostProfile> preset_profiles() {
  CostProfile def;
  def.name = "default";

  CostProfile powered;
  powered.name = "powered_wheelchair";
  powered.grade_ideal = 0.02;
  powered.grade_max = 0.05;
  powered.w_grade = 3.0;
  powered.require_curb_ramps = true;
  powered.ramp_penalty = {0.0, true};
  powered.avoid_construction = true;
  powered.construction_penalty = {0.0, true};

  CostProfile manual;
  manual.name = "manual_assist";
  manual.grade_ideal = 0.02;
  manual.grade_max = 0.0833;
  manual.w_grade = 1.5;
  manual.require_curb_ramps = true;
  manual.ramp_penalty = {200.0, false};
  manual.avoid_construction = true;
  manual.construction_penalty = {500.0, false};

  return {def, powered, manual};
}

std::optional<CostProfile> preset_profile(std::string_view const name) {
  for (auto const& p : preset_profiles()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Constraint const c) {
  switch (c) {
    case Constraint::grade: return "grade";
    case Constraint::curb_ramps: return "curb_ramps";
    case Constraint::construction: return "construction";
  }
  return "?";
}

std::optional<double> edge_cost(GraphEdge const& edge, bool const forward,
                                CostProfile const& profile, Relaxation const relax) {
  auto const rise = forward ? edge.elev_delta : -edge.elev_delta;
  auto const uphill = std::max(0.0, rise) / edge.length;
  auto const steepness = std::abs(edge.elev_delta) / edge.length;

  if (profile.w_grade > 0.0 && steepness > profile.grade_max && !relax.grade) {
    return std::nullopt;
  }
  auto const excess = std::max(0.0, uphill - profile.grade_ideal) /
                      (profile.grade_max - profile.grade_ideal);
  auto cost = profile.w_distance * edge.length * (1.0 + profile.w_grade * excess);

  if (edge.kind == EdgeKind::crossing && profile.require_curb_ramps &&
      !(edge.curb_ramp_a && edge.curb_ramp_b)) {
    if (profile.ramp_penalty.hard) {
      if (!relax.curb_ramps) return std::nullopt;
    } else {
      cost = cost + profile.ramp_penalty.value;
    }
  }
  if (profile.avoid_construction && profile.query_date) {
    auto const active = std::any_of(
        edge.construction.begin(), edge.construction.end(),
        [&](DateInterval const& i) { return i.contains(*profile.query_date); });
    if (active) {
      if (profile.construction_penalty.hard) {
        if (!relax.construction) return std::nullopt;
      } else {
        cost = cost + profile.construction_penalty.value;
      }
    }
  }
  return cost;
}

std::size_t snap(RoutingGraph const& graph, GeoPoint const p, double const radius) {
  if (graph.nodes().empty()) {
    throw UnroutableWaypointError("graph has no nodes", kInf);
  }
  LocalPoint local;
  try {
    local = graph.projection().project(p);
  } catch (ExtentError const&) {
    throw UnroutableWaypointError("waypoint lies outside the network extent", kInf);
  }
  if (auto const n = graph.nearest_node(local, radius)) {
    return *n;
  }
  auto nearest = kInf;
  for (auto const& n : graph.nodes()) {
    nearest = std::min(nearest, distance(n.location, local));
  }
  std::ostringstream msg;
  msg.precision(1);
  msg << std::fixed << "no network node within " << radius
      << " m of the waypoint (nearest is " << nearest << " m away)";
  throw UnroutableWaypointError(msg.str(), nearest);
}

Route make_route(RoutingGraph const& graph, std::size_t const origin,
                 std::vector<RouteLeg> legs) {
  Route r;
  r.nodes.push_back(origin);
  r.cumulative_distance.push_back(0.0);
  r.elevation.push_back(graph.node(origin).elevation);
  for (auto const& leg : legs) {
    auto const& e = graph.edge(leg.edge);
    auto const next = leg.forward ? e.b : e.a;
    r.total_cost += leg.cost;
    r.total_length += e.length;
    r.max_grade = std::max(r.max_grade, e.grade);
    r.nodes.push_back(next);
    r.cumulative_distance.push_back(r.total_length);
    r.elevation.push_back(graph.node(next).elevation);
  }
  r.legs = std::move(legs);
  return r;
}

Route shortest_path(RoutingGraph const& graph, CostProfile const& profile,
                    std::size_t const origin, std::size_t const destination) {
  auto const n = graph.nodes().size();
  if (origin >= n || destination >= n) {
    throw ParameterError("route endpoint is not a graph node");
  }
  if (origin == destination) {
    return make_route(graph, origin, {});
  }

  std::vector<double> dist(n, kInf);
  std::vector<std::optional<std::size_t>> parent_node(n);
  std::vector<RouteLeg> parent_leg(n);
  std::vector<bool> settled(n, false);
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  dist[origin] = 0.0;
  pq.push({0.0, origin});

  while (!pq.empty()) {
    auto const [d, u] = pq.top();
    pq.pop();
    if (settled[u] || d > dist[u]) continue;
    settled[u] = true;
    if (u == destination) break;
    for (auto const& adj : graph.adjacent(u)) {
      auto const v = adj.other;
      if (settled[v]) continue;
      auto const c = edge_cost(graph.edge(adj.edge), adj.forward, profile);
      if (!c) continue;
      auto const nd = d + *c;
      auto better = nd < dist[v];
      if (!better && nd == dist[v] && parent_node[v] && *parent_node[v] != u) {
        auto candidate = path_to(parent_node, u);
        candidate.push_back(v);
        better = candidate < path_to(parent_node, v);
      }
      if (better) {
        dist[v] = nd;
        parent_node[v] = u;
        parent_leg[v] = {adj.edge, adj.forward, *c};
        pq.push({nd, v});
      }
    }
  }

  if (!settled[destination]) {
    std::vector<Constraint> binding;
    for (auto const c : {Constraint::grade, Constraint::curb_ramps, Constraint::construction}) {
      Relaxation r;
      r.grade = c == Constraint::grade;
      r.curb_ramps = c == Constraint::curb_ramps;
      r.construction = c == Constraint::construction;
      if (reachable(graph, profile, r, origin, destination)) {
        binding.push_back(c);
      }
    }
    std::string msg = "no route between nodes " + std::to_string(origin) + " and " +
                      std::to_string(destination);
    if (!binding.empty()) {
      msg += "; blocked by";
      for (auto const c : binding) msg += " " + std::string{to_string(c)};
    } else if (reachable(graph, profile, {true, true, true}, origin, destination)) {
      msg += "; blocked by a combination of constraints";
    } else {
      msg += "; the network does not connect them";
    }
    throw NoRouteError(msg, std::move(binding));
  }

  std::vector<RouteLeg> legs;
  for (auto v = destination; v != origin; v = *parent_node[v]) {
    legs.push_back(parent_leg[v]);
  }
  std::reverse(legs.begin(), legs.end());
  auto route = make_route(graph, origin, std::move(legs));
  route.total_cost = dist[destination];
  return route;
}

}  // namespace sidewalk
