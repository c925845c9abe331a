#include "sidewalk/config.hpp"

#include <cmath>
#include <string>

#include "sidewalk/error.hpp"
#include "sidewalk/ingest.hpp"

namespace sidewalk {

namespace {

double positive(nlohmann::json const& v, std::string const& key) {
  if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() <= 0.0) {
    throw ConfigError("config key '" + key + "' must be a positive number");
  }
  return v.get<double>();
}

}  // namespace

Config parse_config(nlohmann::json const& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  Config c;
  for (auto const& [key, v] : doc.items()) {
    if (key == "origin") {
      if (v.is_null()) {
        continue;
      }
      if (!v.is_object() || !v.contains("lon") || !v.contains("lat") ||
          !v["lon"].is_number() || !v["lat"].is_number()) {
        throw ConfigError("config key 'origin' must be {\"lon\": x, \"lat\": y}");
      }
      c.origin = GeoPoint{v["lon"].get<double>(), v["lat"].get<double>()};
      try {
        validate_wgs84(*c.origin);
      } catch (Error const& e) {
        throw ConfigError(std::string{"config key 'origin': "} + e.what());
      }
    } else if (key == "snap_tol") c.snap_tol = positive(v, key);
    else if (key == "t_angle_min") {
      c.t_angle_min = positive(v, key);
      if (c.t_angle_min > 180.0) {
        throw ConfigError("config key 't_angle_min' must be at most 180");
      }
    }
    else if (key == "t_max_gap") c.t_max_gap = positive(v, key);
    else if (key == "corner_radius") c.corner_radius = positive(v, key);
    else if (key == "corner_max_connect") c.corner_max_connect = positive(v, key);
    else if (key == "min_intersection_degree") {
      if (!v.is_number_integer() || v.get<int>() < 2) {
        throw ConfigError("config key 'min_intersection_degree' must be an integer >= 2");
      }
      c.min_intersection_degree = v.get<int>();
    }
    else if (key == "max_cross") c.max_cross = positive(v, key);
    else if (key == "ramp_radius") c.ramp_radius = positive(v, key);
    else if (key == "construction_buffer") c.construction_buffer = positive(v, key);
    else if (key == "merge_tol") c.merge_tol = positive(v, key);
    else if (key == "orphan_ramp_distance") c.orphan_ramp_distance = positive(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

Config load_config(std::filesystem::path const& path) {
  try {
    return parse_config(read_json_file(path));
  } catch (ConfigError const& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (FormatError const& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json to_json(Config const& c) {
  nlohmann::json j;
  j["origin"] = c.origin ? nlohmann::json{{"lon", c.origin->lon}, {"lat", c.origin->lat}}
                         : nlohmann::json(nullptr);
  j["snap_tol"] = c.snap_tol;
  j["t_angle_min"] = c.t_angle_min;
  j["t_max_gap"] = c.t_max_gap;
  j["corner_radius"] = c.corner_radius;
  j["corner_max_connect"] = c.corner_max_connect;
  j["min_intersection_degree"] = c.min_intersection_degree;
  j["max_cross"] = c.max_cross;
  j["ramp_radius"] = c.ramp_radius;
  j["construction_buffer"] = c.construction_buffer;
  j["merge_tol"] = c.merge_tol;
  j["orphan_ramp_distance"] = c.orphan_ramp_distance;
  return j;
}

}  // namespace sidewalk
