#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sidewalk/config.hpp"
#include "sidewalk/denoise.hpp"
#include "sidewalk/ingest.hpp"
#include "sidewalk/network.hpp"

namespace sidewalk {

struct Datasets {
  SidewalkSet sidewalks;
  StreetSet streets;
  CurbRampSet curb_ramps;
  std::optional<ElevationGrid> elevation;
  std::optional<PermitSet> permits;
};

struct DatasetPaths {
  std::filesystem::path sidewalks;
  std::filesystem::path streets;
  std::filesystem::path curb_ramps;
  std::optional<std::filesystem::path> elevation;
  std::optional<std::filesystem::path> permits;
};

// Projects everything about config.origin, or the street bbox center.
Datasets load_datasets(DatasetPaths const& paths, Config const& config);

struct BuildResult {
  RoutingGraph graph;
  CoverageReport coverage;
  std::vector<StreetNode> street_nodes;
  std::vector<StreetNode> t_nodes;
  std::vector<CornerSector> sectors;
  std::vector<Block> blocks;
  std::vector<RepairAction> repairs;  // T repairs first, then corners
  std::vector<Crossing> crossings;
  SidewalkSet repaired_sidewalks;
  std::vector<std::string> orphan_curb_ramps;
};

// ingest -> denoise -> network. Deterministic for identical inputs.
BuildResult build_network(Datasets const& data, Config const& config);

}  // namespace sidewalk
