#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "sidewalk/router.hpp"

// Reference implementations shared by the unit and acceptance suites.
namespace test_util {

using namespace sidewalk;


inline Projection const kProj{GeoPoint{-122.3321, 47.6062}};

struct EdgeSpec {
  std::size_t a;
  std::size_t b;
  double length;
  EdgeKind kind = EdgeKind::sidewalk;
  double elev_delta = 0.0;
  bool ramp_a = true;
  bool ramp_b = true;
};

inline RoutingGraph make_graph(std::vector<LocalPoint> const& locs, std::vector<EdgeSpec> const& specs) {
  std::vector<GraphNode> nodes;
  for (std::size_t i = 0; i < locs.size(); ++i) nodes.push_back({i, locs[i], 0.0});
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto const& s = specs[i];
    GraphEdge e;
    e.id = i;
    e.a = s.a;
    e.b = s.b;
    e.geometry = Polyline{locs[s.a], locs[s.b]};
    e.kind = s.kind;
    e.length = s.length;
    e.elev_delta = s.elev_delta;
    e.grade = std::abs(s.elev_delta) / s.length;
    e.curb_ramp_a = s.ramp_a;
    e.curb_ramp_b = s.ramp_b;
    if (s.kind == EdgeKind::crossing) e.crossed_street = "st";
    e.source_id = "e" + std::to_string(i);
    edges.push_back(e);
  }
  return RoutingGraph{kProj, std::move(nodes), std::move(edges)};
}

struct PathCost {
  std::vector<std::size_t> nodes;
  double cost;
};

// Every simple path from `from` to `to`, with its cost summed in path order.
inline std::vector<PathCost> enumerate_paths(RoutingGraph const& g, CostProfile const& profile,
                                      std::size_t from, std::size_t to) {
  std::vector<PathCost> out;
  std::vector<bool> on_path(g.nodes().size(), false);
  std::vector<std::size_t> path{from};
  on_path[from] = true;
  std::function<void(std::size_t, double)> rec = [&](std::size_t v, double cost) {
    if (v == to) {
      out.push_back({path, cost});
      return;
    }
    for (auto const& adj : g.adjacent(v)) {
      if (on_path[adj.other]) continue;
      auto const c = edge_cost(g.edge(adj.edge), adj.forward, profile);
      if (!c) continue;
      on_path[adj.other] = true;
      path.push_back(adj.other);
      rec(adj.other, cost + *c);
      path.pop_back();
      on_path[adj.other] = false;
    }
  };
  rec(from, 0.0);
  return out;
}

inline std::optional<double> oracle_min(std::vector<PathCost> const& paths) {
  std::optional<double> best;
  for (auto const& p : paths) {
    if (!best || p.cost < *best) best = p.cost;
  }
  return best;
}

inline std::set<std::vector<std::size_t>> argmin_set(std::vector<PathCost> const& paths, double rel_tol) {
  std::set<std::vector<std::size_t>> out;
  auto const best = oracle_min(paths);
  if (!best) return out;
  for (auto const& p : paths) {
    if (p.cost <= *best * (1.0 + rel_tol)) out.insert(p.nodes);
  }
  return out;
}

// Connected random graph: a random spanning tree plus extra edges, with
// random grades, crossings and missing ramps.
inline RoutingGraph random_graph(std::mt19937_64& rng, bool attributes) {
  std::uniform_int_distribution<int> size{2, 10};
  std::uniform_real_distribution<double> coord{-200.0, 200.0};
  std::uniform_real_distribution<double> len{1.0, 100.0};
  std::uniform_real_distribution<double> grade{-0.1, 0.1};
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  auto const n = static_cast<std::size_t>(size(rng));
  std::vector<LocalPoint> locs;
  for (std::size_t i = 0; i < n; ++i) locs.push_back({coord(rng), coord(rng)});
  std::vector<EdgeSpec> specs;
  auto const add = [&](std::size_t a, std::size_t b) {
    EdgeSpec s{a, b, len(rng)};
    if (attributes) {
      s.elev_delta = grade(rng) * s.length;
      if (unit(rng) < 0.4) {
        s.kind = EdgeKind::crossing;
        s.ramp_a = unit(rng) < 0.6;
        s.ramp_b = unit(rng) < 0.6;
      }
    }
    specs.push_back(s);
  };
  for (std::size_t i = 1; i < n; ++i) {
    add(std::uniform_int_distribution<std::size_t>{0, i - 1}(rng), i);
  }
  std::uniform_int_distribution<std::size_t> pick{0, n - 1};
  auto const extra = std::uniform_int_distribution<int>{0, 12}(rng);
  for (int k = 0; k < extra; ++k) {
    auto const a = pick(rng);
    auto const b = pick(rng);
    if (a != b) add(a, b);
  }
  return make_graph(locs, specs);
}

inline CostProfile attribute_profile() {
  CostProfile p;
  p.w_grade = 2.0;
  p.grade_max = 0.08;
  p.require_curb_ramps = true;
  p.ramp_penalty = {150.0, false};
  return p;
}

}  // namespace test_util
