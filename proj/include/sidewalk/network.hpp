#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sidewalk/date.hpp"
#include "sidewalk/denoise.hpp"
#include "sidewalk/geometry.hpp"
#include "sidewalk/ingest.hpp"
#include "sidewalk/spatial_index.hpp"

namespace sidewalk {

enum class EdgeKind { sidewalk, t_connector, corner_connector, crossing };

std::string_view to_string(EdgeKind k);
EdgeKind edge_kind_from_string(std::string_view s);

struct GraphNode {
  std::size_t id = 0;
  LocalPoint location;
  double elevation = 0.0;
};

struct GraphEdge {
  std::size_t id = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  Polyline geometry{LocalPoint{0, 0}, LocalPoint{1, 0}};
  EdgeKind kind = EdgeKind::sidewalk;
  double length = 0.0;
  double elev_delta = 0.0;  // elevation(b) - elevation(a)
  double grade = 0.0;       // |elev_delta| / length
  bool curb_ramp_a = false;
  bool curb_ramp_b = false;
  std::optional<std::string> crossed_street;
  std::vector<DateInterval> construction;
  std::string source_id;
};

// Edge geometry and attributes before nodes are assigned.
struct EdgeDraft {
  Polyline geometry{LocalPoint{0, 0}, LocalPoint{1, 0}};
  EdgeKind kind = EdgeKind::sidewalk;
  std::string source_id;
  std::optional<std::string> crossed_street;
  bool curb_ramp_a = false;  // at geometry.front()
  bool curb_ramp_b = false;  // at geometry.back()
  std::vector<DateInterval> construction;
};

// A crossing that lands on a sidewalk interior splits that sidewalk there.
struct SplitPoint {
  std::size_t feature = 0;
  std::size_t segment_index = 0;
  LocalPoint point;
};

struct Crossing {
  EdgeDraft edge;
  std::size_t node_id = 0;
  std::size_t from_sector = 0;
  std::optional<std::size_t> to_sector;  // empty when landing on a sidewalk
  std::optional<SplitPoint> split;
};

struct Adjacency {
  std::size_t edge = 0;
  std::size_t other = 0;
  bool forward = true;  // traversing a -> b
};

// Undirected, immutable once built. Adjacency lists and the node index are
// derived from the node/edge lists at construction.
class RoutingGraph {
 public:
  RoutingGraph(Projection projection, std::vector<GraphNode> nodes,
               std::vector<GraphEdge> edges);

  Projection const& projection() const { return projection_; }
  std::span<GraphNode const> nodes() const { return nodes_; }
  std::span<GraphEdge const> edges() const { return edges_; }
  GraphNode const& node(std::size_t id) const { return nodes_.at(id); }
  GraphEdge const& edge(std::size_t id) const { return edges_.at(id); }
  std::span<Adjacency const> adjacent(std::size_t node) const {
    return adjacency_.at(node);
  }

  std::vector<std::size_t> nodes_within(LocalPoint p, double radius) const {
    return index_.within(p, radius);
  }
  std::optional<std::size_t> nearest_node(LocalPoint p, double radius) const {
    return index_.nearest(p, radius);
  }

  std::size_t component_count() const { return component_count_; }
  std::size_t component_of(std::size_t node) const { return component_.at(node); }

 private:
  Projection projection_;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<Adjacency>> adjacency_;
  PointIndex index_;
  std::vector<std::size_t> component_;
  std::size_t component_count_ = 0;
};

// Sidewalk features (original and connectors) as drafts, one per feature.
std::vector<EdgeDraft> sidewalk_drafts(SidewalkSet const& sidewalks);

std::vector<Crossing> generate_crossings(SidewalkSet const& sidewalks,
                                         std::span<CornerSector const> sectors,
                                         StreetSet const& streets,
                                         double max_cross = 40.0);

double sample_elevation(ElevationGrid const& grid, LocalPoint p);

RoutingGraph annotate_elevation(RoutingGraph graph, ElevationGrid const& grid);

std::vector<EdgeDraft> annotate_curb_ramps(std::vector<EdgeDraft> crossings,
                                           CurbRampSet const& ramps,
                                           double ramp_radius = 5.0);

// Attaches the active interval of every sidewalk-impacting permit within
// `buffer` of an edge. Dates are not filtered here.
std::vector<EdgeDraft> annotate_construction(std::vector<EdgeDraft> edges,
                                             PermitSet const& permits,
                                             double buffer = 10.0);

RoutingGraph assemble_graph(Projection const& projection,
                            std::vector<EdgeDraft> sidewalk_edges,
                            std::span<Crossing const> crossings,
                            double merge_tol = 0.01);

RoutingGraph assemble_graph(Projection const& projection,
                            std::vector<EdgeDraft> edges, double merge_tol = 0.01);

std::vector<EdgeDraft> graph_drafts(RoutingGraph const& graph);

struct CoverageReport {
  std::size_t t_candidates = 0;
  std::size_t t_repaired = 0;
  CornerMetrics corners;
  std::size_t intersections = 0;
  std::size_t sectors_with_endpoints = 0;
  std::size_t sectors_crossed = 0;      // among sectors with endpoints
  std::size_t sectors_crossed_any = 0;  // among all sectors
  std::size_t crossings = 0;
  std::size_t component_count = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;

  double t_repair_rate() const;
  double corner_edit_rate() const { return corners.corner_edit_rate(); }
  double block_connectivity_rate() const { return corners.blocks.rate(); }
  double crossing_corner_rate() const;
  double crossing_corner_rate_all() const;
  std::vector<std::string> zero_denominators() const;
};

CoverageReport coverage_report(RoutingGraph const& graph,
                               std::span<CornerSector const> sectors,
                               std::span<Crossing const> crossings,
                               TRepairResult const& t_repairs,
                               CornerMetrics const& corners);

json to_json(CoverageReport const& report);

}  // namespace sidewalk
