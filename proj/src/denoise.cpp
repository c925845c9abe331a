#include "sidewalk/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "sidewalk/error.hpp"
#include "sidewalk/spatial_index.hpp"

namespace sidewalk {

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::size_t> parent;
};

LocalPoint unit_from_bearing(double const b) {
  auto const rad = b * std::acos(-1.0) / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

int side_of(LocalPoint const dir, LocalPoint const v) {
  auto const c = cross(dir, v);
  return c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
}

struct Candidate {
  EndpointRef ref;
  LocalPoint location;
};

// Greedy closest-pair-first matching between endpoints of distinct features.
// Pairs closer than kEpsilon are matched without producing a connector.
std::vector<std::pair<std::size_t, std::size_t>> greedy_pairs(
    std::span<Candidate const> cands, double const max_gap) {
  struct Pair {
    double gap;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      if (cands[i].ref.feature == cands[j].ref.feature) {
        continue;
      }
      auto const gap = distance(cands[i].location, cands[j].location);
      if (gap <= max_gap) {
        pairs.push_back({gap, i, j});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](Pair const& a, Pair const& b) {
    return std::tie(a.gap, a.i, a.j) < std::tie(b.gap, b.i, b.j);
  });
  std::vector<bool> used(cands.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto const& p : pairs) {
    if (!used[p.i] && !used[p.j]) {
      used[p.i] = used[p.j] = true;
      out.emplace_back(p.i, p.j);
    }
  }
  return out;
}

std::size_t distinct_features(std::span<Candidate const> cands) {
  std::set<std::size_t> f;
  for (auto const& c : cands) {
    f.insert(c.ref.feature);
  }
  return f.size();
}

std::string connector_id(RepairKind const kind, std::size_t const n) {
  return std::string{to_string(kind)} + ":" + std::to_string(n);
}

Feature connector_feature(RepairAction const& a, std::size_t const n) {
  Properties props;
  props[kKindKey] = std::string{a.kind == RepairKind::t_repair ? kTConnectorKind
                                                              : kCornerConnectorKind};
  props["gap_m"] = a.gap;
  props["from"] = a.first_id;
  props["to"] = a.second_id;
  props["node"] = static_cast<std::int64_t>(a.node_id);
  return {connector_id(a.kind, n), a.geometry, std::move(props)};
}

std::vector<Candidate> sidewalk_endpoints(SidewalkSet const& sidewalks) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < sidewalks.features.size(); ++i) {
    auto const& f = sidewalks.features[i];
    if (f.is_point() || is_connector(f)) {
      continue;
    }
    out.push_back({{i, 0}, f.line().front()});
    out.push_back({{i, 1}, f.line().back()});
  }
  return out;
}

bool point_in_ring(LocalPoint const p, std::span<LocalPoint const> ring) {
  auto inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    auto const a = ring[i];
    auto const b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      auto const x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double ring_area(std::span<LocalPoint const> ring) {
  auto a = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    a += cross(ring[j], ring[i]);
  }
  return 0.5 * a;
}

}  // namespace

std::string_view to_string(RepairKind const k) {
  return k == RepairKind::t_repair ? "t_repair" : "corner_connect";
}

bool is_connector(Feature const& f) {
  auto const it = f.properties.find(kKindKey);
  if (it == f.properties.end() || !std::holds_alternative<std::string>(it->second)) {
    return false;
  }
  auto const& k = std::get<std::string>(it->second);
  return k == kTConnectorKind || k == kCornerConnectorKind;
}

LocalPoint endpoint_location(SidewalkSet const& sidewalks, EndpointRef const e) {
  auto const& line = sidewalks.features.at(e.feature).line();
  return e.end == 0 ? line.front() : line.back();
}

std::vector<StreetNode> build_street_topology(StreetSet const& streets,
                                              double const snap_tol) {
  if (streets.features.empty()) {
    throw EmptyDatasetError("street dataset is empty");
  }
  auto const cell = std::max(snap_tol, 1.0);
  auto const cell_of = [cell](LocalPoint const p) {
    return std::pair{static_cast<std::int64_t>(std::floor(p.x / cell)),
                     static_cast<std::int64_t>(std::floor(p.y / cell))};
  };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> grid;
  std::vector<LocalPoint> anchors;
  std::vector<std::vector<LocalPoint>> members;
  std::vector<StreetNode> nodes;

  auto const node_for = [&](LocalPoint const p) {
    auto const [cx, cy] = cell_of(p);
    std::optional<std::size_t> best;
    auto best_d = std::numeric_limits<double>::infinity();
    for (auto dx = -1; dx <= 1; ++dx) {
      for (auto dy = -1; dy <= 1; ++dy) {
        auto const it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (auto const n : it->second) {
          auto const d = distance(anchors[n], p);
          if (d <= snap_tol && (d < best_d || (d == best_d && n < *best))) {
            best = n;
            best_d = d;
          }
        }
      }
    }
    if (best) {
      members[*best].push_back(p);
      return *best;
    }
    auto const id = nodes.size();
    nodes.push_back({id, p, {}});
    anchors.push_back(p);
    members.push_back({p});
    grid[{cx, cy}].push_back(id);
    return id;
  };

  for (std::size_t s = 0; s < streets.features.size(); ++s) {
    auto const& f = streets.features[s];
    if (f.is_point()) {
      throw SchemaError("street '" + f.id + "' is not a polyline");
    }
    auto const& line = f.line();
    auto const head = point_along(line, kDepartureLength);
    auto const tail = point_along(line.reversed(), kDepartureLength);
    auto const a = node_for(line.front());
    nodes[a].incident.push_back({f.id, s, true, bearing(line.front(), head)});
    auto const b = node_for(line.back());
    nodes[b].incident.push_back({f.id, s, false, bearing(line.back(), tail)});
  }

  for (auto& n : nodes) {
    auto sum = LocalPoint{};
    for (auto const p : members[n.id]) {
      sum = sum + p;
    }
    n.location = sum * (1.0 / static_cast<double>(members[n.id].size()));
  }
  return nodes;
}

std::optional<std::pair<std::size_t, std::size_t>> through_pair(
    StreetNode const& node, double const min_angle) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  auto best_sep = -1.0;
  for (std::size_t i = 0; i < node.incident.size(); ++i) {
    for (std::size_t j = i + 1; j < node.incident.size(); ++j) {
      auto const sep =
          angle_between_bearings(node.incident[i].bearing, node.incident[j].bearing);
      if (sep >= min_angle && sep > best_sep) {
        best_sep = sep;
        best = {i, j};
      }
    }
  }
  return best;
}

std::vector<StreetNode> detect_t_intersections(std::span<StreetNode const> nodes,
                                               double const min_angle) {
  std::vector<StreetNode> out;
  for (auto const& n : nodes) {
    if (n.degree() == 3 && through_pair(n, min_angle)) {
      out.push_back(n);
    }
  }
  return out;
}

TRepairResult repair_t_gaps(SidewalkSet const& sidewalks,
                            std::span<StreetNode const> t_nodes,
                            double const max_gap, double const min_angle) {
  TRepairResult result{sidewalks, {}, 0, 0};
  auto const all = sidewalk_endpoints(sidewalks);
  std::vector<LocalPoint> locations;
  for (auto const& c : all) {
    locations.push_back(c.location);
  }
  PointIndex const index{locations, std::max(max_gap, 1.0)};
  std::set<EndpointRef> used;

  for (auto const& node : t_nodes) {
    auto const pair = through_pair(node, min_angle);
    if (!pair || node.degree() != 3) {
      continue;
    }
    auto const stem = 3 - pair->first - pair->second;
    auto const dir = unit_from_bearing(node.incident[pair->first].bearing);
    auto const stem_side = side_of(dir, unit_from_bearing(node.incident[stem].bearing));
    if (stem_side == 0) {
      continue;
    }

    std::vector<Candidate> cands;
    for (auto const i : index.within(node.location, max_gap)) {
      auto const& c = all[i];
      if (used.contains(c.ref)) continue;
      if (side_of(dir, c.location - node.location) == -stem_side) {
        cands.push_back(c);
      }
    }
    if (distinct_features(cands) < 2) {
      continue;
    }
    ++result.candidate_nodes;
    auto repaired = false;
    for (auto const& [i, j] : greedy_pairs(cands, max_gap)) {
      used.insert(cands[i].ref);
      used.insert(cands[j].ref);
      auto const gap = distance(cands[i].location, cands[j].location);
      if (gap <= kEpsilon) {
        continue;
      }
      RepairAction a{RepairKind::t_repair,
                     Polyline{cands[i].location, cands[j].location},
                     cands[i].ref,
                     cands[j].ref,
                     sidewalks.features[cands[i].ref.feature].id,
                     sidewalks.features[cands[j].ref.feature].id,
                     gap,
                     node.id};
      result.sidewalks.features.push_back(connector_feature(a, result.actions.size()));
      result.actions.push_back(std::move(a));
      repaired = true;
    }
    if (repaired) {
      ++result.repaired_nodes;
    }
  }
  return result;
}

std::vector<CornerSector> classify_corner_endpoints(SidewalkSet const& sidewalks,
                                                    std::span<StreetNode const> nodes,
                                                    double const corner_radius,
                                                    std::size_t const min_degree) {
  std::vector<CornerSector> sectors;
  // (node id, first sector index) for intersections only
  std::vector<std::size_t> node_ids;
  std::vector<LocalPoint> node_locs;
  std::unordered_map<std::size_t, std::size_t> first_sector;

  for (auto const& n : nodes) {
    if (n.degree() < min_degree) {
      continue;
    }
    std::vector<Incidence> inc = n.incident;
    std::stable_sort(inc.begin(), inc.end(), [](Incidence const& a, Incidence const& b) {
      return a.bearing < b.bearing;
    });
    first_sector[n.id] = sectors.size();
    node_ids.push_back(n.id);
    node_locs.push_back(n.location);
    for (std::size_t k = 0; k < inc.size(); ++k) {
      auto const& lo = inc[k];
      auto const& hi = inc[(k + 1) % inc.size()];
      sectors.push_back({n.id, n.location, k, inc.size(), lo.bearing, hi.bearing,
                         lo.street_index, hi.street_index, {}});
    }
  }
  if (node_ids.empty()) {
    return sectors;
  }

  PointIndex const index{node_locs, std::max(corner_radius, 1.0)};
  for (auto const& c : sidewalk_endpoints(sidewalks)) {
    std::optional<std::size_t> best;
    auto best_d = std::numeric_limits<double>::infinity();
    for (auto const i : index.within(c.location, corner_radius)) {
      auto const d = distance(node_locs[i], c.location);
      if (d < best_d || (d == best_d && node_ids[i] < node_ids[*best])) {
        best = i;
        best_d = d;
      }
    }
    if (!best || best_d <= kEpsilon) {
      continue;
    }
    auto const theta = bearing(node_locs[*best], c.location);
    auto const first = first_sector.at(node_ids[*best]);
    auto const k = sectors[first].node_degree;
    for (std::size_t s = first; s < first + k; ++s) {
      auto& sec = sectors[s];
      auto const width = k == 1 ? 360.0 : normalize_bearing(sec.b_hi - sec.b_lo);
      if (width == 0.0 && k > 1) {
        continue;
      }
      if (normalize_bearing(theta - sec.b_lo) < width) {
        sec.members.push_back(c.ref);
        break;
      }
    }
  }
  return sectors;
}

std::vector<Block> extract_blocks(StreetSet const& streets,
                                  std::span<StreetNode const> nodes,
                                  SidewalkSet const& sidewalks) {
  // Half-edge h = 2 * street + (0 forward, 1 backward).
  auto const n_streets = streets.features.size();
  std::vector<std::size_t> start_node(n_streets), end_node(n_streets);
  std::vector<std::vector<Incidence>> sorted(nodes.size());
  for (auto const& n : nodes) {
    for (auto const& inc : n.incident) {
      (inc.at_start ? start_node : end_node)[inc.street_index] = n.id;
    }
    sorted[n.id] = n.incident;
    std::stable_sort(sorted[n.id].begin(), sorted[n.id].end(),
                     [](Incidence const& a, Incidence const& b) {
                       return a.bearing < b.bearing;
                     });
  }

  std::vector<bool> visited(2 * n_streets, false);
  std::vector<Block> blocks;
  for (std::size_t h0 = 0; h0 < 2 * n_streets; ++h0) {
    if (visited[h0] || streets.features[h0 / 2].is_point()) {
      continue;
    }
    std::vector<LocalPoint> ring;
    auto h = h0;
    auto guard = 0U;
    while (!visited[h] && guard++ <= 2 * n_streets) {
      visited[h] = true;
      auto const s = h / 2;
      auto const forward = h % 2 == 0;
      auto const pts = streets.features[s].line().points();
      if (forward) {
        ring.insert(ring.end(), pts.begin(), pts.end() - 1);
      } else {
        ring.insert(ring.end(), pts.rbegin(), pts.rend() - 1);
      }
      auto const v = forward ? end_node[s] : start_node[s];
      auto const& inc = sorted[v];
      // The arriving street, seen from v, is the incidence at the far end.
      std::size_t k = 0;
      for (; k < inc.size(); ++k) {
        if (inc[k].street_index == s && inc[k].at_start == !forward) break;
      }
      auto const& next = inc[(k + 1) % inc.size()];
      h = 2 * next.street_index + (next.at_start ? 0 : 1);
    }
    if (ring.size() < 3) {
      continue;
    }
    auto const area = ring_area(ring);
    if (area > kEpsilon) {
      blocks.push_back({blocks.size(), std::move(ring), area, {}});
    }
  }

  for (std::size_t i = 0; i < sidewalks.features.size(); ++i) {
    auto const& f = sidewalks.features[i];
    if (f.is_point() || is_connector(f)) {
      continue;
    }
    auto const mid = point_along(f.line(), 0.5 * polyline_length(f.line()));
    Block* best = nullptr;
    for (auto& b : blocks) {
      if ((best == nullptr || b.area < best->area) && point_in_ring(mid, b.ring)) {
        best = &b;
      }
    }
    if (best != nullptr) {
      best->sidewalks.push_back(i);
    }
  }
  return blocks;
}

BlockConnectivity block_connectivity(SidewalkSet const& sidewalks,
                                     std::span<Block const> blocks,
                                     double const merge_tol) {
  std::vector<LocalPoint> ends;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < sidewalks.features.size(); ++i) {
    auto const& f = sidewalks.features[i];
    if (f.is_point()) continue;
    ends.push_back(f.line().front());
    owner.push_back(i);
    ends.push_back(f.line().back());
    owner.push_back(i);
  }
  UnionFind uf{sidewalks.features.size()};
  PointIndex const index{ends, 1.0};
  for (std::size_t e = 0; e < ends.size(); ++e) {
    for (auto const o : index.within(ends[e], merge_tol)) {
      uf.unite(owner[e], owner[o]);
    }
  }
  BlockConnectivity out;
  for (auto const& b : blocks) {
    if (b.sidewalks.empty()) continue;
    ++out.blocks;
    auto const root = uf.find(b.sidewalks.front());
    if (std::all_of(b.sidewalks.begin(), b.sidewalks.end(),
                    [&](std::size_t s) { return uf.find(s) == root; })) {
      ++out.connected;
    }
  }
  return out;
}

CornerConnectResult connect_block_corners(SidewalkSet const& sidewalks,
                                          std::span<CornerSector const> sectors,
                                          double const max_connect,
                                          std::span<RepairAction const> prior,
                                          std::span<Block const> blocks,
                                          double const merge_tol) {
  CornerConnectResult result{sidewalks, {}, {}};
  std::set<EndpointRef> joined;
  for (auto const& a : prior) {
    joined.insert(a.first);
    joined.insert(a.second);
  }
  auto const prior_joined = joined;

  for (auto const& sec : sectors) {
    ++result.metrics.sectors;
    std::vector<Candidate> all;
    std::vector<Candidate> cands;
    for (auto const& m : sec.members) {
      Candidate const c{m, endpoint_location(sidewalks, m)};
      all.push_back(c);
      if (!joined.contains(m)) {
        cands.push_back(c);
      }
    }
    auto edited = std::any_of(sec.members.begin(), sec.members.end(),
                              [&](EndpointRef const& m) { return prior_joined.contains(m); });
    for (auto const& [i, j] : greedy_pairs(cands, max_connect)) {
      joined.insert(cands[i].ref);
      joined.insert(cands[j].ref);
      auto const gap = distance(cands[i].location, cands[j].location);
      if (gap <= kEpsilon) {
        continue;
      }
      RepairAction a{RepairKind::corner_connect,
                     Polyline{cands[i].location, cands[j].location},
                     cands[i].ref,
                     cands[j].ref,
                     sidewalks.features[cands[i].ref.feature].id,
                     sidewalks.features[cands[j].ref.feature].id,
                     gap,
                     sec.node_id};
      result.sidewalks.features.push_back(connector_feature(a, result.actions.size()));
      result.actions.push_back(std::move(a));
      edited = true;
    }
    if (edited) {
      ++result.metrics.edited_sectors_any;
    }
    if (distinct_features(all) >= 2) {
      ++result.metrics.editable_sectors;
      if (edited) {
        ++result.metrics.edited_sectors;
      }
    }
  }
  result.metrics.blocks = block_connectivity(result.sidewalks, blocks, merge_tol);
  return result;
}

json repairs_to_geojson(std::span<RepairAction const> actions,
                        Projection const& projection) {
  auto features = json::array();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    auto const& a = actions[i];
    auto coords = json::array();
    for (auto const p : a.geometry.points()) {
      auto const g = projection.unproject(p);
      coords.push_back({g.lon, g.lat});
    }
    features.push_back(
        {{"type", "Feature"},
         {"id", connector_id(a.kind, i)},
         {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
         {"properties",
          {{"kind", a.kind == RepairKind::t_repair ? kTConnectorKind : kCornerConnectorKind},
           {"gap_m", a.gap},
           {"from", a.first_id},
           {"from_end", a.first.end},
           {"to", a.second_id},
           {"to_end", a.second.end},
           {"node", a.node_id}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace sidewalk
