#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sidewalk/geometry.hpp"
#include "sidewalk/ingest.hpp"

namespace sidewalk {

// Length of street used to measure the departure bearing at a node.
inline constexpr double kDepartureLength = 10.0;

// Property key marking repair geometry appended to a sidewalk set.
inline constexpr char const* kKindKey = "kind";
inline constexpr char const* kTConnectorKind = "t_connector";
inline constexpr char const* kCornerConnectorKind = "corner_connector";

struct Incidence {
  std::string street_id;
  std::size_t street_index = 0;
  bool at_start = true;  // which end of the street touches the node
  double bearing = 0.0;  // leaving the node along the street

  friend bool operator==(Incidence const&, Incidence const&) = default;
};

struct StreetNode {
  std::size_t id = 0;
  LocalPoint location;
  std::vector<Incidence> incident;

  std::size_t degree() const { return incident.size(); }
};

// One end of a sidewalk feature; end 0 is the first vertex, 1 the last.
struct EndpointRef {
  std::size_t feature = 0;
  int end = 0;

  friend auto operator<=>(EndpointRef const&, EndpointRef const&) = default;
};

LocalPoint endpoint_location(SidewalkSet const& sidewalks, EndpointRef e);
bool is_connector(Feature const& f);

struct CornerSector {
  std::size_t node_id = 0;
  LocalPoint node_location;
  std::size_t index = 0;       // position among the node's sectors
  std::size_t node_degree = 0;  // number of sectors at the node
  double b_lo = 0.0;           // clockwise wedge [b_lo, b_hi)
  double b_hi = 0.0;
  std::size_t street_lo = 0;  // street index at b_lo
  std::size_t street_hi = 0;  // street index at b_hi
  std::vector<EndpointRef> members;
};

enum class RepairKind { t_repair, corner_connect };

struct RepairAction {
  RepairKind kind = RepairKind::t_repair;
  Polyline geometry{LocalPoint{0, 0}, LocalPoint{1, 0}};
  EndpointRef first;
  EndpointRef second;
  std::string first_id;
  std::string second_id;
  double gap = 0.0;
  std::size_t node_id = 0;
};

std::string_view to_string(RepairKind k);

std::vector<StreetNode> build_street_topology(StreetSet const& streets,
                                              double snap_tol = 0.5);

// Index pair of the most nearly opposite incidences when their separation is
// at least min_angle. Separations fold at 180, so [170, 190] becomes
// [170, 180].
std::optional<std::pair<std::size_t, std::size_t>> through_pair(
    StreetNode const& node, double min_angle = 170.0);

std::vector<StreetNode> detect_t_intersections(std::span<StreetNode const> nodes,
                                               double min_angle = 170.0);

struct TRepairResult {
  SidewalkSet sidewalks;  // input features followed by t_connector features
  std::vector<RepairAction> actions;
  std::size_t candidate_nodes = 0;  // T-nodes with joinable far-side endpoints
  std::size_t repaired_nodes = 0;
};

TRepairResult repair_t_gaps(SidewalkSet const& sidewalks,
                            std::span<StreetNode const> t_nodes,
                            double max_gap = 30.48, double min_angle = 170.0);

std::vector<CornerSector> classify_corner_endpoints(
    SidewalkSet const& sidewalks, std::span<StreetNode const> nodes,
    double corner_radius = 30.0, std::size_t min_degree = 3);

// A bounded face of the street network with the sidewalk features inside it.
struct Block {
  std::size_t id = 0;
  std::vector<LocalPoint> ring;  // counter-clockwise
  double area = 0.0;
  std::vector<std::size_t> sidewalks;
};

std::vector<Block> extract_blocks(StreetSet const& streets,
                                  std::span<StreetNode const> nodes,
                                  SidewalkSet const& sidewalks);

struct BlockConnectivity {
  std::size_t blocks = 0;  // blocks containing at least one sidewalk
  std::size_t connected = 0;
  double rate() const {
    return blocks == 0 ? 0.0 : static_cast<double>(connected) / static_cast<double>(blocks);
  }
};

BlockConnectivity block_connectivity(SidewalkSet const& sidewalks,
                                     std::span<Block const> blocks,
                                     double merge_tol = 0.01);

struct CornerMetrics {
  std::size_t sectors = 0;
  std::size_t editable_sectors = 0;  // members from >= 2 distinct features
  std::size_t edited_sectors = 0;    // editable sectors with >= 1 repair
  std::size_t edited_sectors_any = 0;
  BlockConnectivity blocks;

  double corner_edit_rate() const {
    return editable_sectors == 0
               ? 0.0
               : static_cast<double>(edited_sectors) / static_cast<double>(editable_sectors);
  }
  double corner_edit_rate_all() const {
    return sectors == 0 ? 0.0
                        : static_cast<double>(edited_sectors_any) / static_cast<double>(sectors);
  }
};

struct CornerConnectResult {
  SidewalkSet sidewalks;  // input followed by corner_connector features
  std::vector<RepairAction> actions;
  CornerMetrics metrics;
};

// Greedy nearest-pair matching inside each sector. Endpoints already joined
// by `prior` repairs are not reused; those repairs still count as edits.
CornerConnectResult connect_block_corners(SidewalkSet const& sidewalks,
                                          std::span<CornerSector const> sectors,
                                          double max_connect = 30.48,
                                          std::span<RepairAction const> prior = {},
                                          std::span<Block const> blocks = {},
                                          double merge_tol = 0.01);

json repairs_to_geojson(std::span<RepairAction const> actions,
                        Projection const& projection);

}  // namespace sidewalk
