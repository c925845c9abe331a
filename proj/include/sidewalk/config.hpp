#pragma once

#include <filesystem>
#include <optional>

#include "nlohmann/json.hpp"

#include "sidewalk/geometry.hpp"

namespace sidewalk {

// Every pipeline threshold. The JSON config file uses exactly these member
// names; omitted keys keep their defaults, unknown keys are rejected.
struct Config {
  std::optional<GeoPoint> origin;  // default: center of the street bbox

  double snap_tol = 0.5;              // street endpoint merge, m
  double t_angle_min = 170.0;         // near-collinear pair at a T, degrees
  double t_max_gap = 30.48;           // 100 ft
  double corner_radius = 30.0;        // endpoint-to-intersection, m
  double corner_max_connect = 30.48;  // 100 ft
  int min_intersection_degree = 3;
  double max_cross = 40.0;
  double ramp_radius = 5.0;
  double construction_buffer = 10.0;
  double merge_tol = 0.01;
  double orphan_ramp_distance = 50.0;
};

Config parse_config(nlohmann::json const& doc);
Config load_config(std::filesystem::path const& path);
nlohmann::json to_json(Config const& config);

}  // namespace sidewalk
