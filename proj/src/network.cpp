#include "sidewalk/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include "sidewalk/error.hpp"

namespace sidewalk {

namespace {

struct Box {
  LocalPoint lo, hi;

  static Box of(Polyline const& line) {
    Box b{line.front(), line.front()};
    for (auto const p : line.points()) {
      b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
      b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
    }
    return b;
  }
  static Box of(LocalPoint const p) { return {p, p}; }

  Box expanded(double const d) const {
    return {{lo.x - d, lo.y - d}, {hi.x + d, hi.y + d}};
  }
  bool overlaps(Box const& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
  }
};

// Bucket grid over polyline segments for "what sidewalk is near here".
class SegmentGrid {
 public:
  SegmentGrid(SidewalkSet const& sidewalks, double cell) : cell_(cell) {
    for (std::size_t f = 0; f < sidewalks.features.size(); ++f) {
      auto const& feat = sidewalks.features[f];
      if (feat.is_point() || is_connector(feat)) continue;
      auto const pts = feat.line().points();
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        auto const x0 = cell_of(std::min(pts[s].x, pts[s + 1].x));
        auto const x1 = cell_of(std::max(pts[s].x, pts[s + 1].x));
        auto const y0 = cell_of(std::min(pts[s].y, pts[s + 1].y));
        auto const y1 = cell_of(std::max(pts[s].y, pts[s + 1].y));
        for (auto x = x0; x <= x1; ++x) {
          for (auto y = y0; y <= y1; ++y) {
            cells_[{x, y}].push_back(f);
          }
        }
      }
    }
  }

  // Features with a segment bucket overlapping the query disc's box.
  std::vector<std::size_t> near(LocalPoint const p, double const r) const {
    std::set<std::size_t> out;
    for (auto x = cell_of(p.x - r); x <= cell_of(p.x + r); ++x) {
      for (auto y = cell_of(p.y - r); y <= cell_of(p.y + r); ++y) {
        if (auto const it = cells_.find({x, y}); it != cells_.end()) {
          out.insert(it->second.begin(), it->second.end());
        }
      }
    }
    return {out.begin(), out.end()};
  }

 private:
  std::int64_t cell_of(double const v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }

  double cell_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> cells_;
};

EdgeKind kind_of_feature(Feature const& f) {
  auto const it = f.properties.find(kKindKey);
  if (it != f.properties.end() && std::holds_alternative<std::string>(it->second)) {
    auto const& k = std::get<std::string>(it->second);
    if (k == kTConnectorKind) return EdgeKind::t_connector;
    if (k == kCornerConnectorKind) return EdgeKind::corner_connector;
  }
  return EdgeKind::sidewalk;
}

using PointKey = std::pair<double, double>;

PointKey key_of(LocalPoint const p) { return {p.x, p.y}; }

// Splits each draft at the given points (segment index, point), in order
// along the line.
std::vector<Polyline> split_many(Polyline const& line,
                                 std::vector<std::pair<std::size_t, LocalPoint>> cuts) {
  auto const pts = line.points();
  std::sort(cuts.begin(), cuts.end(), [&](auto const& a, auto const& b) {
    if (a.first != b.first) return a.first < b.first;
    return distance(pts[a.first], a.second) < distance(pts[b.first], b.second);
  });
  std::vector<Polyline> out;
  std::vector<LocalPoint> current{pts.front()};
  std::size_t next_vertex = 1;
  for (auto const& [seg, at] : cuts) {
    while (next_vertex <= seg) {
      current.push_back(pts[next_vertex++]);
    }
    current.push_back(at);
    if (auto piece = Polyline::cleaned(current)) {
      out.push_back(*std::move(piece));
    }
    current = {at};
  }
  while (next_vertex < pts.size()) {
    current.push_back(pts[next_vertex++]);
  }
  if (auto piece = Polyline::cleaned(current)) {
    out.push_back(*std::move(piece));
  }
  return out;
}

}  // namespace

std::string_view to_string(EdgeKind const k) {
  switch (k) {
    case EdgeKind::sidewalk: return "sidewalk";
    case EdgeKind::t_connector: return "t_connector";
    case EdgeKind::corner_connector: return "corner_connector";
    case EdgeKind::crossing: return "crossing";
  }
  return "?";
}

EdgeKind edge_kind_from_string(std::string_view const s) {
  if (s == "sidewalk") return EdgeKind::sidewalk;
  if (s == "t_connector") return EdgeKind::t_connector;
  if (s == "corner_connector") return EdgeKind::corner_connector;
  if (s == "crossing") return EdgeKind::crossing;
  throw SchemaError("unknown edge kind '" + std::string{s} + "'");
}

RoutingGraph::RoutingGraph(Projection projection, std::vector<GraphNode> nodes,
                           std::vector<GraphEdge> edges)
    : projection_(std::move(projection)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      adjacency_(nodes_.size()) {
  std::vector<LocalPoint> locs;
  locs.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != i) {
      throw SchemaError("graph node ids must be dense and ordered");
    }
    locs.push_back(nodes_[i].location);
  }
  index_ = PointIndex{locs, 50.0};

  std::vector<std::size_t> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto const find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto const& e = edges_[i];
    if (e.id != i) {
      throw SchemaError("graph edge ids must be dense and ordered");
    }
    if (e.a >= nodes_.size() || e.b >= nodes_.size()) {
      throw SchemaError("edge " + std::to_string(i) + " references a missing node");
    }
    adjacency_[e.a].push_back({i, e.b, true});
    adjacency_[e.b].push_back({i, e.a, false});
    auto const ra = find(e.a);
    auto const rb = find(e.b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  component_.resize(nodes_.size());
  std::unordered_map<std::size_t, std::size_t> label;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto const r = find(i);
    auto const [it, inserted] = label.emplace(r, label.size());
    component_[i] = it->second;
  }
  component_count_ = label.size();
}

std::vector<EdgeDraft> sidewalk_drafts(SidewalkSet const& sidewalks) {
  std::vector<EdgeDraft> out;
  out.reserve(sidewalks.features.size());
  for (auto const& f : sidewalks.features) {
    if (f.is_point()) {
      throw SchemaError("sidewalk '" + f.id + "' is not a polyline");
    }
    out.push_back({f.line(), kind_of_feature(f), f.id, std::nullopt, false, false, {}});
  }
  return out;
}

std::vector<Crossing> generate_crossings(SidewalkSet const& sidewalks,
                                         std::span<CornerSector const> sectors,
                                         StreetSet const& streets,
                                         double const max_cross) {
  std::vector<Crossing> out;
  std::set<std::pair<PointKey, PointKey>> seen;
  SegmentGrid const grid{sidewalks, 50.0};

  auto const emit = [&](std::size_t const s, std::optional<std::size_t> const to,
                        std::size_t const street, LocalPoint const from_pt,
                        LocalPoint const to_pt, std::optional<SplitPoint> split) {
    auto key = std::pair{key_of(from_pt), key_of(to_pt)};
    if (key.second < key.first) std::swap(key.first, key.second);
    if (!seen.insert(key).second) {
      return;
    }
    EdgeDraft d{Polyline{from_pt, to_pt}, EdgeKind::crossing,
                "crossing:" + std::to_string(out.size()), streets.features[street].id,
                false, false, {}};
    out.push_back({std::move(d), sectors[s].node_id, s, to, split});
  };

  for (std::size_t s = 0; s < sectors.size(); ++s) {
    auto const& sec = sectors[s];
    if (sec.members.empty() || sec.node_degree < 2) {
      continue;
    }
    auto const first = s - sec.index;
    auto const k = sec.node_degree;
    std::pair<std::size_t, std::size_t> const sides[2] = {
        {sec.street_hi, first + (sec.index + 1) % k},
        {sec.street_lo, first + (sec.index + k - 1) % k}};
    for (auto const& [street, opposite] : sides) {
      auto const& street_line = streets.features[street].line();
      auto const& opp = sectors[opposite];

      if (!opp.members.empty()) {
        struct Pair {
          double d;
          std::size_t i, j;
          LocalPoint a, b;
        };
        std::vector<Pair> pairs;
        for (std::size_t i = 0; i < sec.members.size(); ++i) {
          for (std::size_t j = 0; j < opp.members.size(); ++j) {
            auto const a = endpoint_location(sidewalks, sec.members[i]);
            auto const b = endpoint_location(sidewalks, opp.members[j]);
            pairs.push_back({distance(a, b), i, j, a, b});
          }
        }
        std::sort(pairs.begin(), pairs.end(), [](Pair const& x, Pair const& y) {
          return std::tie(x.d, x.i, x.j) < std::tie(y.d, y.i, y.j);
        });
        for (auto const& p : pairs) {
          if (p.d <= kEpsilon || p.d > max_cross) {
            continue;
          }
          if (segment_crosses_polyline(p.a, p.b, street_line)) {
            emit(s, opposite, street, p.a, p.b, std::nullopt);
            break;
          }
        }
        continue;
      }

      // Opposite corner empty: land on the closest sidewalk across the street.
      struct Landing {
        double d;
        std::size_t member;
        std::size_t feature;
        PolylineProjection proj;
      };
      std::optional<Landing> best;
      for (std::size_t i = 0; i < sec.members.size(); ++i) {
        auto const from = endpoint_location(sidewalks, sec.members[i]);
        for (auto const f : grid.near(from, max_cross)) {
          if (f == sec.members[i].feature) continue;
          auto const proj = closest_point_on_polyline(from, sidewalks.features[f].line());
          if (proj.distance <= kEpsilon || proj.distance > max_cross) continue;
          if (best && std::tie(proj.distance, i, f) >= std::tie(best->d, best->member, best->feature)) {
            continue;
          }
          if (segment_crosses_polyline(from, proj.point, street_line)) {
            best = Landing{proj.distance, i, f, proj};
          }
        }
      }
      if (best) {
        auto const from = endpoint_location(sidewalks, sec.members[best->member]);
        auto const& line = sidewalks.features[best->feature].line();
        std::optional<SplitPoint> split;
        if (distance(best->proj.point, line.front()) > kEpsilon &&
            distance(best->proj.point, line.back()) > kEpsilon) {
          split = SplitPoint{best->feature, best->proj.segment_index, best->proj.point};
        }
        emit(s, std::nullopt, street, from, best->proj.point, split);
      }
    }
  }
  return out;
}

double sample_elevation(ElevationGrid const& grid, LocalPoint const p) {
  return grid.sample(p);
}

RoutingGraph annotate_elevation(RoutingGraph graph, ElevationGrid const& grid) {
  std::vector<GraphNode> nodes(graph.nodes().begin(), graph.nodes().end());
  std::vector<GraphEdge> edges(graph.edges().begin(), graph.edges().end());
  std::vector<bool> sampled(nodes.size(), false);
  auto const elevation_of = [&](std::size_t n, std::size_t edge_id) {
    if (!sampled[n]) {
      try {
        nodes[n].elevation = grid.sample(nodes[n].location);
      } catch (ExtentError const& e) {
        throw ExtentError("edge " + std::to_string(edge_id) + ": " + e.what());
      } catch (NodataError const& e) {
        throw NodataError("edge " + std::to_string(edge_id) + ": " + e.what());
      }
      sampled[n] = true;
    }
    return nodes[n].elevation;
  };
  for (auto& e : edges) {
    e.elev_delta = elevation_of(e.b, e.id) - elevation_of(e.a, e.id);
    e.grade = std::abs(e.elev_delta) / e.length;
  }
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (!sampled[n]) {
      nodes[n].elevation = grid.sample(nodes[n].location);
    }
  }
  return RoutingGraph{graph.projection(), std::move(nodes), std::move(edges)};
}

std::vector<EdgeDraft> annotate_curb_ramps(std::vector<EdgeDraft> crossings,
                                           CurbRampSet const& ramps,
                                           double const ramp_radius) {
  std::vector<LocalPoint> pts;
  for (auto const& r : ramps.features) {
    if (r.is_point()) pts.push_back(r.point());
  }
  PointIndex const index{pts, std::max(ramp_radius, 1.0)};
  for (auto& c : crossings) {
    c.curb_ramp_a = !index.within(c.geometry.front(), ramp_radius).empty();
    c.curb_ramp_b = !index.within(c.geometry.back(), ramp_radius).empty();
  }
  return crossings;
}

std::vector<EdgeDraft> annotate_construction(std::vector<EdgeDraft> edges,
                                             PermitSet const& permits,
                                             double const buffer) {
  std::vector<Box> permit_boxes;
  for (auto const& p : permits.permits) {
    permit_boxes.push_back(p.feature.is_point() ? Box::of(p.feature.point())
                                                : Box::of(p.feature.line()));
  }
  for (auto& e : edges) {
    auto const box = Box::of(e.geometry).expanded(buffer);
    for (std::size_t i = 0; i < permits.permits.size(); ++i) {
      auto const& p = permits.permits[i];
      if (!p.sidewalk_impact || !box.overlaps(permit_boxes[i])) {
        continue;
      }
      auto const d = p.feature.is_point()
                         ? point_polyline_distance(p.feature.point(), e.geometry)
                         : polyline_distance(p.feature.line(), e.geometry);
      if (d <= buffer) {
        e.construction.push_back(p.active);
      }
    }
  }
  return edges;
}

RoutingGraph assemble_graph(Projection const& projection,
                            std::vector<EdgeDraft> sidewalk_edges,
                            std::span<Crossing const> crossings,
                            double const merge_tol) {
  std::map<std::size_t, std::vector<std::pair<std::size_t, LocalPoint>>> cuts;
  for (auto const& c : crossings) {
    if (c.split) {
      cuts[c.split->feature].emplace_back(c.split->segment_index, c.split->point);
    }
  }
  std::vector<EdgeDraft> all;
  all.reserve(sidewalk_edges.size() + crossings.size());
  for (std::size_t i = 0; i < sidewalk_edges.size(); ++i) {
    auto const it = cuts.find(i);
    if (it == cuts.end()) {
      all.push_back(std::move(sidewalk_edges[i]));
      continue;
    }
    for (auto& piece : split_many(sidewalk_edges[i].geometry, it->second)) {
      auto d = sidewalk_edges[i];
      d.geometry = std::move(piece);
      all.push_back(std::move(d));
    }
  }
  for (auto const& c : crossings) {
    all.push_back(c.edge);
  }
  return assemble_graph(projection, std::move(all), merge_tol);
}

RoutingGraph assemble_graph(Projection const& projection, std::vector<EdgeDraft> drafts,
                            double const merge_tol) {
  if (drafts.empty()) {
    throw EmptyDatasetError("cannot assemble a graph from an empty edge set");
  }
  PointSnapper snapper{merge_tol};
  std::vector<GraphEdge> edges;
  std::set<std::tuple<std::size_t, std::size_t, EdgeKind>> seen;

  auto const add = [&](EdgeDraft const& d, Polyline geometry) {
    auto const a = snapper.snap(geometry.front());
    auto const b = snapper.snap(geometry.back());
    auto pts = std::vector<LocalPoint>(geometry.points().begin(), geometry.points().end());
    pts.front() = snapper.anchors()[a];
    pts.back() = snapper.anchors()[b];
    auto snapped = Polyline::cleaned(std::move(pts));
    if (!snapped || a == b) {
      return;
    }
    auto const key = std::tuple{std::min(a, b), std::max(a, b), d.kind};
    if (!seen.insert(key).second) {
      return;
    }
    GraphEdge e;
    e.id = edges.size();
    e.a = a;
    e.b = b;
    e.length = polyline_length(*snapped);
    e.geometry = *std::move(snapped);
    e.kind = d.kind;
    e.curb_ramp_a = d.curb_ramp_a;
    e.curb_ramp_b = d.curb_ramp_b;
    e.crossed_street = d.crossed_street;
    e.construction = d.construction;
    e.source_id = d.source_id;
    edges.push_back(std::move(e));
  };

  for (auto const& d : drafts) {
    auto const closed = distance(d.geometry.front(), d.geometry.back()) <= merge_tol;
    if (closed && d.geometry.size() >= 3) {
      // A closed ring becomes two edges so it does not collapse to a loop.
      auto const mid = d.geometry.size() / 2;
      auto const pts = d.geometry.points();
      auto first = Polyline::cleaned({pts.begin(), pts.begin() + mid + 1});
      auto second = Polyline::cleaned({pts.begin() + mid, pts.end()});
      if (first) add(d, *first);
      if (second) add(d, *second);
      continue;
    }
    add(d, d.geometry);
  }

  std::vector<GraphNode> nodes;
  nodes.reserve(snapper.anchors().size());
  for (std::size_t i = 0; i < snapper.anchors().size(); ++i) {
    nodes.push_back({i, snapper.anchors()[i], 0.0});
  }
  return RoutingGraph{projection, std::move(nodes), std::move(edges)};
}

std::vector<EdgeDraft> graph_drafts(RoutingGraph const& graph) {
  std::vector<EdgeDraft> out;
  for (auto const& e : graph.edges()) {
    out.push_back({e.geometry, e.kind, e.source_id, e.crossed_street, e.curb_ramp_a,
                   e.curb_ramp_b, e.construction});
  }
  return out;
}

double CoverageReport::t_repair_rate() const {
  return t_candidates == 0 ? 0.0
                           : static_cast<double>(t_repaired) / static_cast<double>(t_candidates);
}

double CoverageReport::crossing_corner_rate() const {
  return sectors_with_endpoints == 0 ? 0.0
                                     : static_cast<double>(sectors_crossed) /
                                           static_cast<double>(sectors_with_endpoints);
}

double CoverageReport::crossing_corner_rate_all() const {
  return corners.sectors == 0 ? 0.0
                              : static_cast<double>(sectors_crossed_any) /
                                    static_cast<double>(corners.sectors);
}

std::vector<std::string> CoverageReport::zero_denominators() const {
  std::vector<std::string> out;
  if (t_candidates == 0) out.emplace_back("t_repair_rate");
  if (corners.editable_sectors == 0) out.emplace_back("corner_edit_rate");
  if (corners.sectors == 0) {
    out.emplace_back("corner_edit_rate_all");
    out.emplace_back("crossing_corner_rate_all");
  }
  if (corners.blocks.blocks == 0) out.emplace_back("block_connectivity_rate");
  if (sectors_with_endpoints == 0) out.emplace_back("crossing_corner_rate");
  return out;
}

CoverageReport coverage_report(RoutingGraph const& graph,
                               std::span<CornerSector const> sectors,
                               std::span<Crossing const> crossings,
                               TRepairResult const& t_repairs,
                               CornerMetrics const& corners) {
  CoverageReport r;
  r.t_candidates = t_repairs.candidate_nodes;
  r.t_repaired = t_repairs.repaired_nodes;
  r.corners = corners;
  std::set<std::size_t> nodes;
  std::vector<bool> crossed(sectors.size(), false);
  for (auto const& c : crossings) {
    crossed.at(c.from_sector) = true;
    if (c.to_sector) crossed.at(*c.to_sector) = true;
  }
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    nodes.insert(sectors[s].node_id);
    if (crossed[s]) ++r.sectors_crossed_any;
    if (!sectors[s].members.empty()) {
      ++r.sectors_with_endpoints;
      if (crossed[s]) ++r.sectors_crossed;
    }
  }
  r.intersections = nodes.size();
  r.crossings = static_cast<std::size_t>(std::count_if(
      graph.edges().begin(), graph.edges().end(),
      [](GraphEdge const& e) { return e.kind == EdgeKind::crossing; }));
  r.component_count = graph.component_count();
  r.nodes = graph.nodes().size();
  r.edges = graph.edges().size();
  return r;
}

json to_json(CoverageReport const& r) {
  return {
      {"t_repair_rate", r.t_repair_rate()},
      {"corner_edit_rate", r.corner_edit_rate()},
      {"corner_edit_rate_all", r.corners.corner_edit_rate_all()},
      {"block_connectivity_rate", r.block_connectivity_rate()},
      {"crossing_corner_rate", r.crossing_corner_rate()},
      {"crossing_corner_rate_all", r.crossing_corner_rate_all()},
      {"component_count", r.component_count},
      {"zero_denominators", r.zero_denominators()},
      {"counts",
       {{"t_candidates", r.t_candidates},
        {"t_repaired", r.t_repaired},
        {"intersections", r.intersections},
        {"sectors", r.corners.sectors},
        {"editable_sectors", r.corners.editable_sectors},
        {"edited_sectors", r.corners.edited_sectors},
        {"blocks", r.corners.blocks.blocks},
        {"blocks_connected", r.corners.blocks.connected},
        {"sectors_with_endpoints", r.sectors_with_endpoints},
        {"sectors_crossed", r.sectors_crossed},
        {"crossings", r.crossings},
        {"nodes", r.nodes},
        {"edges", r.edges}}}};
}

}  // namespace sidewalk
