#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nlohmann/json.hpp"

#include "sidewalk/date.hpp"
#include "sidewalk/geometry.hpp"

namespace sidewalk {

using json = nlohmann::json;

using PropertyValue =
    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string>;
using Properties = std::map<std::string, PropertyValue>;

enum class GeometryKind { point, polyline, any };

std::string_view to_string(GeometryKind k);

struct Feature {
  std::string id;
  std::variant<LocalPoint, Polyline> geometry;
  Properties properties;

  bool is_point() const { return std::holds_alternative<LocalPoint>(geometry); }
  LocalPoint const& point() const { return std::get<LocalPoint>(geometry); }
  Polyline const& line() const { return std::get<Polyline>(geometry); }
};

struct FeatureSet {
  GeometryKind kind = GeometryKind::polyline;
  Projection projection{GeoPoint{}};
  std::vector<Feature> features;
};

// Input dataset roles. Each alias names the expected geometry.
using SidewalkSet = FeatureSet;  // polylines
using StreetSet = FeatureSet;    // polylines
using CurbRampSet = FeatureSet;  // points

struct Permit {
  Feature feature;
  DateInterval active;
  bool sidewalk_impact = false;
};

struct PermitSet {
  Projection projection{GeoPoint{}};
  std::vector<Permit> permits;
};

// Property keys used by the permit schema.
inline constexpr char const* kPermitStartKey = "start_date";
inline constexpr char const* kPermitEndKey = "end_date";
inline constexpr char const* kPermitImpactKey = "sidewalk_impact";

// Reads a JSON document; parse failures become FormatError with line context.
json read_json_file(std::filesystem::path const& path);
json parse_json_text(std::string const& text, std::string const& source);

FeatureSet parse_features(json const& collection, GeometryKind expected,
                          Projection const& projection,
                          std::string const& source = "<memory>");
FeatureSet load_features(std::filesystem::path const& path,
                         GeometryKind expected, Projection const& projection);

// Center of the bounding box of every coordinate in a FeatureCollection.
GeoPoint bbox_center(json const& collection);

PermitSet parse_permits(json const& collection, Projection const& projection,
                        std::string const& source = "<memory>");
PermitSet load_permits(std::filesystem::path const& path,
                       Projection const& projection);

// Keeps permits that impact the sidewalk and are active on query_date.
PermitSet filter_permits(PermitSet const& permits, Date query_date);

json to_geojson(FeatureSet const& set);
json to_geojson(PermitSet const& set);
void write_json_file(std::filesystem::path const& path, json const& doc);

// ESRI ASCII grid. Corner coordinates are meters in the local projected
// frame, so the grid shares its origin with the vector datasets.
struct ElevationGrid {
  int ncols = 0;
  int nrows = 0;
  double cellsize = 0.0;
  LocalPoint lower_left;
  double nodata = -9999.0;
  std::vector<double> values;  // row-major, top row first

  double value(int row, int col) const {
    return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) +
                  static_cast<std::size_t>(col)];
  }
  bool is_nodata(double v) const { return v == nodata || !std::isfinite(v); }

  // Cell-center coordinate of (row, col); row 0 is the northernmost.
  LocalPoint cell_center(int row, int col) const;

  double sample(LocalPoint p) const;
};

ElevationGrid parse_elevation_grid(std::istream& in,
                                   std::string const& source = "<stream>");
ElevationGrid load_elevation_grid(std::filesystem::path const& path);
void write_elevation_grid(std::ostream& out, ElevationGrid const& grid);

// Curb ramps further than max_distance from every sidewalk endpoint. They stay
// loaded; the ids are reported for review.
std::vector<std::string> orphan_curb_ramps(CurbRampSet const& ramps,
                                           SidewalkSet const& sidewalks,
                                           double max_distance = 50.0);

}  // namespace sidewalk
