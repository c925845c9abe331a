#include <cmath>
#include <sstream>

#include "sidewalk/router.hpp"

namespace sidewalk {

namespace {

// Headings when entering and leaving an edge in the travel direction.
std::pair<double, double> travel_bearings(GraphEdge const& e, bool const forward) {
  auto const pts = e.geometry.points();
  auto const n = pts.size();
  if (forward) {
    return {bearing(pts[0], pts[1]), bearing(pts[n - 2], pts[n - 1])};
  }
  return {bearing(pts[n - 1], pts[n - 2]), bearing(pts[1], pts[0])};
}

std::string compass(double const b) {
  static constexpr char const* names[] = {"north", "northeast", "east", "southeast",
                                          "south", "southwest", "west", "northwest"};
  return names[static_cast<int>(std::floor(normalize_bearing(b + 22.5) / 45.0)) % 8];
}

std::string meters(double const m) {
  std::ostringstream s;
  s << static_cast<long long>(std::llround(m)) << " m";
  return s.str();
}

}  // namespace

std::string_view to_string(Maneuver const m) {
  switch (m) {
    case Maneuver::depart: return "depart";
    case Maneuver::continue_on: return "continue";
    case Maneuver::turn_left: return "turn_left";
    case Maneuver::turn_right: return "turn_right";
    case Maneuver::cross_street: return "cross_street";
    case Maneuver::arrive: return "arrive";
  }
  return "?";
}

std::vector<Step> build_directions(Route const& route, RoutingGraph const& graph) {
  std::vector<Step> steps;
  std::vector<double> headings;  // entry heading of each step

  auto const open = [&](Maneuver m, double heading) {
    steps.push_back({"", m, 0.0, {}});
    headings.push_back(heading);
  };

  for (std::size_t i = 0; i < route.legs.size(); ++i) {
    auto const& leg = route.legs[i];
    auto const& e = graph.edge(leg.edge);
    auto const [entry, exit] = travel_bearings(e, leg.forward);
    auto const is_crossing = e.kind == EdgeKind::crossing;

    if (i == 0) {
      if (is_crossing) {
        open(Maneuver::depart, entry);
        open(Maneuver::cross_street, entry);
      } else {
        open(Maneuver::depart, entry);
      }
    } else {
      auto const& prev_leg = route.legs[i - 1];
      auto const& prev = graph.edge(prev_leg.edge);
      auto const prev_exit = travel_bearings(prev, prev_leg.forward).second;
      auto const turn = signed_turn(prev_exit, entry);
      if (is_crossing) {
        open(Maneuver::cross_street, entry);
      } else if (std::abs(turn) >= kTurnThreshold) {
        open(turn < 0.0 ? Maneuver::turn_left : Maneuver::turn_right, entry);
      } else if (prev.kind == EdgeKind::crossing) {
        open(Maneuver::continue_on, entry);
      }
    }
    steps.back().edges.push_back(leg.edge);
    steps.back().length += e.length;
    (void)exit;
  }
  if (steps.empty()) {
    open(Maneuver::depart, 0.0);
  }
  open(Maneuver::arrive, 0.0);

  for (std::size_t s = 0; s < steps.size(); ++s) {
    auto& step = steps[s];
    auto const dir = compass(headings[s]);
    switch (step.maneuver) {
      case Maneuver::depart:
        step.instruction = step.edges.empty()
                               ? "Start at the origin"
                               : "Head " + dir + " for " + meters(step.length);
        break;
      case Maneuver::continue_on:
        step.instruction = "Continue " + dir + " for " + meters(step.length);
        break;
      case Maneuver::turn_left:
        step.instruction = "Turn left and go " + dir + " for " + meters(step.length);
        break;
      case Maneuver::turn_right:
        step.instruction = "Turn right and go " + dir + " for " + meters(step.length);
        break;
      case Maneuver::cross_street: {
        auto const& e = graph.edge(step.edges.front());
        step.instruction = "Cross " + (e.crossed_street ? *e.crossed_street : "the street") +
                           " heading " + dir + " (" + meters(step.length) + ")";
        if (!(e.curb_ramp_a && e.curb_ramp_b)) {
          step.instruction += ", curb ramp missing";
        }
        break;
      }
      case Maneuver::arrive:
        step.instruction = "Arrive at the destination";
        break;
    }
  }
  return steps;
}

}  // namespace sidewalk
