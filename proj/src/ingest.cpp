#include "sidewalk/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

#include "sidewalk/error.hpp"
#include "sidewalk/spatial_index.hpp"

namespace sidewalk {

namespace {

std::string line_context(std::string const& text, std::size_t const byte) {
  auto line = 1;
  auto col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string feature_label(std::string const& source, std::string const& id) {
  return source + ": feature '" + id + "'";
}

GeoPoint parse_position(json const& pos, std::string const& where) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
      !pos[1].is_number()) {
    throw SchemaError(where + ": position must be [lon, lat]");
  }
  return {pos[0].get<double>(), pos[1].get<double>()};
}

LocalPoint project_checked(Projection const& projection, json const& pos,
                           std::string const& where) {
  auto const g = parse_position(pos, where);
  try {
    return projection.project(g);
  } catch (ExtentError const& e) {
    throw ExtentError(where + ": " + e.what());
  }
}

Polyline parse_line(Projection const& projection, json const& coords,
                    std::string const& where) {
  if (!coords.is_array()) {
    throw SchemaError(where + ": LineString coordinates must be an array");
  }
  std::vector<LocalPoint> pts;
  pts.reserve(coords.size());
  for (auto const& c : coords) {
    pts.push_back(project_checked(projection, c, where));
  }
  auto line = Polyline::cleaned(std::move(pts));
  if (!line) {
    throw SchemaError(where + ": LineString has fewer than two distinct points");
  }
  return *std::move(line);
}

PropertyValue to_property(json const& v) {
  switch (v.type()) {
    case json::value_t::null: return nullptr;
    case json::value_t::boolean: return v.get<bool>();
    case json::value_t::number_integer: return v.get<std::int64_t>();
    case json::value_t::number_unsigned:
      return static_cast<std::int64_t>(v.get<std::uint64_t>());
    case json::value_t::number_float: return v.get<double>();
    case json::value_t::string: return v.get<std::string>();
    default: return v.dump();  // nested values are kept as their JSON text
  }
}

json from_property(PropertyValue const& v) {
  return std::visit([](auto const& x) -> json { return x; }, v);
}

std::string id_of(json const& feature, std::size_t const index) {
  if (auto const it = feature.find("id"); it != feature.end()) {
    if (it->is_string() && !it->get<std::string>().empty()) {
      return it->get<std::string>();
    }
    if (it->is_number_integer() || it->is_number_unsigned()) {
      return it->dump();
    }
  }
  return "f" + std::to_string(index);
}

// Returns (id, geometry) pairs; multi-geometries expand to "<id>:<part>".
std::vector<std::pair<std::string, std::variant<LocalPoint, Polyline>>>
parse_geometry(json const& feature, std::string const& id,
               GeometryKind const expected, Projection const& projection,
               std::string const& source) {
  auto const where = feature_label(source, id);
  auto const it = feature.find("geometry");
  if (it == feature.end() || !it->is_object()) {
    throw SchemaError(where + ": missing geometry");
  }
  auto const type = it->value("type", std::string{});
  auto const& coords = (*it)["coordinates"];
  std::vector<std::pair<std::string, std::variant<LocalPoint, Polyline>>> out;

  auto const want_point = expected == GeometryKind::point || expected == GeometryKind::any;
  auto const want_line = expected == GeometryKind::polyline || expected == GeometryKind::any;

  if (type == "Point" && want_point) {
    out.emplace_back(id, project_checked(projection, coords, where));
  } else if (type == "MultiPoint" && want_point && coords.is_array()) {
    for (std::size_t k = 0; k < coords.size(); ++k) {
      out.emplace_back(id + ":" + std::to_string(k),
                       project_checked(projection, coords[k], where));
    }
  } else if (type == "LineString" && want_line) {
    out.emplace_back(id, parse_line(projection, coords, where));
  } else if (type == "MultiLineString" && want_line && coords.is_array()) {
    for (std::size_t k = 0; k < coords.size(); ++k) {
      out.emplace_back(id + ":" + std::to_string(k),
                       parse_line(projection, coords[k], where));
    }
  } else {
    throw SchemaError(where + ": geometry type '" + type +
                      "' does not match expected " +
                      std::string{to_string(expected)});
  }
  return out;
}

json const& features_array(json const& collection, std::string const& source) {
  if (!collection.is_object() ||
      collection.value("type", std::string{}) != "FeatureCollection") {
    throw SchemaError(source + ": not a GeoJSON FeatureCollection");
  }
  auto const it = collection.find("features");
  if (it == collection.end() || !it->is_array()) {
    throw SchemaError(source + ": FeatureCollection without a features array");
  }
  return *it;
}

void collect_positions(json const& coords, std::vector<GeoPoint>& out) {
  if (!coords.is_array() || coords.empty()) {
    return;
  }
  if (coords[0].is_number()) {
    if (coords.size() >= 2 && coords[1].is_number()) {
      out.push_back({coords[0].get<double>(), coords[1].get<double>()});
    }
    return;
  }
  for (auto const& c : coords) {
    collect_positions(c, out);
  }
}

json geometry_json(Feature const& f, Projection const& projection) {
  auto const pos = [&](LocalPoint const p) {
    auto const g = projection.unproject(p);
    return json::array({g.lon, g.lat});
  };
  if (f.is_point()) {
    return {{"type", "Point"}, {"coordinates", pos(f.point())}};
  }
  auto coords = json::array();
  for (auto const p : f.line().points()) {
    coords.push_back(pos(p));
  }
  return {{"type", "LineString"}, {"coordinates", std::move(coords)}};
}

json feature_json(Feature const& f, Projection const& projection) {
  auto props = json::object();
  for (auto const& [k, v] : f.properties) {
    props[k] = from_property(v);
  }
  return {{"type", "Feature"},
          {"id", f.id},
          {"geometry", geometry_json(f, projection)},
          {"properties", std::move(props)}};
}

}  // namespace

std::string_view to_string(GeometryKind const k) {
  switch (k) {
    case GeometryKind::point: return "point";
    case GeometryKind::polyline: return "polyline";
    case GeometryKind::any: return "point or polyline";
  }
  return "?";
}

json parse_json_text(std::string const& text, std::string const& source) {
  try {
    return json::parse(text);
  } catch (json::parse_error const& e) {
    throw FormatError(source + ": JSON parse error at " +
                      line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                      e.what());
  }
}

json read_json_file(std::filesystem::path const& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw FormatError(path.string() + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

void write_json_file(std::filesystem::path const& path, json const& doc) {
  std::ofstream out{path, std::ios::binary};
  if (!out) {
    throw FormatError(path.string() + ": cannot open for writing");
  }
  out << doc.dump(1) << '\n';
}

FeatureSet parse_features(json const& collection, GeometryKind const expected,
                          Projection const& projection, std::string const& source) {
  FeatureSet set{expected, projection, {}};
  auto const& features = features_array(collection, source);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto const& f = features[i];
    auto const id = id_of(f, i);
    if (!f.is_object()) {
      throw SchemaError(feature_label(source, id) + ": not a JSON object");
    }
    Properties props;
    if (auto const it = f.find("properties"); it != f.end() && it->is_object()) {
      for (auto const& [k, v] : it->items()) {
        props.emplace(k, to_property(v));
      }
    }
    for (auto& [part_id, geometry] :
         parse_geometry(f, id, expected, projection, source)) {
      if (!seen.insert(part_id).second) {
        throw SchemaError(feature_label(source, part_id) + ": duplicate id");
      }
      set.features.push_back({part_id, std::move(geometry), props});
    }
  }
  return set;
}

FeatureSet load_features(std::filesystem::path const& path,
                         GeometryKind const expected, Projection const& projection) {
  return parse_features(read_json_file(path), expected, projection, path.string());
}

GeoPoint bbox_center(json const& collection) {
  std::vector<GeoPoint> pts;
  for (auto const& f : features_array(collection, "<bbox>")) {
    if (f.contains("geometry") && f["geometry"].is_object()) {
      collect_positions(f["geometry"].value("coordinates", json::array()), pts);
    }
  }
  if (pts.empty()) {
    throw EmptyDatasetError("cannot derive a projection origin from an empty dataset");
  }
  auto lo = pts.front();
  auto hi = pts.front();
  for (auto const p : pts) {
    lo = {std::min(lo.lon, p.lon), std::min(lo.lat, p.lat)};
    hi = {std::max(hi.lon, p.lon), std::max(hi.lat, p.lat)};
  }
  return {0.5 * (lo.lon + hi.lon), 0.5 * (lo.lat + hi.lat)};
}

PermitSet parse_permits(json const& collection, Projection const& projection,
                        std::string const& source) {
  auto const features = parse_features(collection, GeometryKind::any, projection, source);
  PermitSet out{projection, {}};
  for (auto const& f : features.features) {
    auto const where = feature_label(source, f.id);
    auto const date_of = [&](char const* key) {
      auto const it = f.properties.find(key);
      if (it == f.properties.end() || !std::holds_alternative<std::string>(it->second)) {
        throw SchemaError(where + ": missing ISO-8601 string property '" +
                          std::string{key} + "'");
      }
      try {
        return parse_date(std::get<std::string>(it->second));
      } catch (FormatError const& e) {
        throw SchemaError(where + ": " + e.what());
      }
    };
    auto const start = date_of(kPermitStartKey);
    auto const end = date_of(kPermitEndKey);
    if (end < start) {
      throw SchemaError(where + ": start_date is after end_date");
    }
    auto const impact = f.properties.find(kPermitImpactKey);
    if (impact == f.properties.end() || !std::holds_alternative<bool>(impact->second)) {
      throw SchemaError(where + ": missing boolean property 'sidewalk_impact'");
    }
    out.permits.push_back({f, {start, end}, std::get<bool>(impact->second)});
  }
  return out;
}

PermitSet load_permits(std::filesystem::path const& path, Projection const& projection) {
  return parse_permits(read_json_file(path), projection, path.string());
}

PermitSet filter_permits(PermitSet const& permits, Date const query_date) {
  PermitSet out{permits.projection, {}};
  for (auto const& p : permits.permits) {
    if (p.sidewalk_impact && p.active.contains(query_date)) {
      out.permits.push_back(p);
    }
  }
  return out;
}

json to_geojson(FeatureSet const& set) {
  auto features = json::array();
  for (auto const& f : set.features) {
    features.push_back(feature_json(f, set.projection));
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

json to_geojson(PermitSet const& set) {
  auto features = json::array();
  for (auto const& p : set.permits) {
    auto f = p.feature;
    f.properties[kPermitStartKey] = format_date(p.active.start);
    f.properties[kPermitEndKey] = format_date(p.active.end);
    f.properties[kPermitImpactKey] = p.sidewalk_impact;
    features.push_back(feature_json(f, set.projection));
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

LocalPoint ElevationGrid::cell_center(int const row, int const col) const {
  return {lower_left.x + (col + 0.5) * cellsize,
          lower_left.y + (nrows - row - 0.5) * cellsize};
}

double ElevationGrid::sample(LocalPoint const p) const {
  auto const width = ncols * cellsize;
  auto const height = nrows * cellsize;
  auto const fx = (p.x - lower_left.x) / cellsize - 0.5;  // column coordinate
  auto const fy = (lower_left.y + height - p.y) / cellsize - 0.5;  // row coordinate
  if (!(p.x >= lower_left.x && p.x <= lower_left.x + width && p.y >= lower_left.y &&
        p.y <= lower_left.y + height)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") lies outside the elevation grid";
    throw ExtentError(msg.str());
  }
  // Inside the half-cell border the nearest center row/column is used.
  auto const cx = std::clamp(fx, 0.0, static_cast<double>(ncols - 1));
  auto const cy = std::clamp(fy, 0.0, static_cast<double>(nrows - 1));
  auto const c0 = std::min(static_cast<int>(std::floor(cx)), ncols - 2);
  auto const r0 = std::min(static_cast<int>(std::floor(cy)), nrows - 2);
  auto const tx = cx - c0;
  auto const ty = cy - r0;

  double const weights[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  int const rows[4] = {r0, r0, r0 + 1, r0 + 1};
  int const cols[4] = {c0, c0 + 1, c0, c0 + 1};
  auto z = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (weights[k] == 0.0) {
      continue;
    }
    auto const v = value(rows[k], cols[k]);
    if (is_nodata(v)) {
      std::ostringstream msg;
      msg << "nodata cell (" << rows[k] << ", " << cols[k]
          << ") next to point (" << p.x << ", " << p.y << ")";
      throw NodataError(msg.str());
    }
    z += weights[k] * v;
  }
  return z;
}

ElevationGrid parse_elevation_grid(std::istream& in, std::string const& source) {
  ElevationGrid g;
  std::optional<double> xll, yll;
  auto center_registered = false;
  std::set<std::string> seen;
  std::string line;
  auto line_no = 0;
  auto const fail = [&](std::string const& what) {
    throw FormatError(source + ": line " + std::to_string(line_no) + ": " + what);
  };

  // Header: six "key value" lines, NODATA_value optional.
  while (seen.size() < 6) {
    auto const pos = in.tellg();
    if (!std::getline(in, line)) {
      fail("truncated header");
    }
    ++line_no;
    std::istringstream ls{line};
    std::string key;
    double v = 0;
    if (!(ls >> key)) {
      fail("empty header line");
    }
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0])))) {
      // Data started; NODATA_value was omitted.
      if (seen.size() == 5 && !seen.contains("nodata_value")) {
        in.seekg(pos);
        --line_no;
        break;
      }
      fail("malformed header");
    }
    if (!(ls >> v)) {
      fail("header key '" + key + "' has no numeric value");
    }
    if (!seen.insert(key).second) {
      fail("duplicate header key '" + key + "'");
    }
    if (key == "ncols") g.ncols = static_cast<int>(v);
    else if (key == "nrows") g.nrows = static_cast<int>(v);
    else if (key == "xllcorner") xll = v;
    else if (key == "yllcorner") yll = v;
    else if (key == "xllcenter") { xll = v; center_registered = true; }
    else if (key == "yllcenter") { yll = v; center_registered = true; }
    else if (key == "cellsize") g.cellsize = v;
    else if (key == "nodata_value") g.nodata = v;
    else fail("unknown header key '" + key + "'");
  }
  if (g.ncols < 2 || g.nrows < 2) {
    fail("ncols and nrows must be at least 2");
  }
  if (!(g.cellsize > 0.0)) {
    fail("cellsize must be positive");
  }
  if (!xll || !yll) {
    fail("missing lower-left corner");
  }
  g.lower_left = {*xll, *yll};
  if (center_registered) {
    g.lower_left = g.lower_left - LocalPoint{0.5 * g.cellsize, 0.5 * g.cellsize};
  }

  auto const expected = static_cast<std::size_t>(g.ncols) * static_cast<std::size_t>(g.nrows);
  g.values.reserve(expected);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      auto const v = std::stod(token, &used);
      if (used != token.size()) {
        throw std::invalid_argument(token);
      }
      g.values.push_back(v);
    } catch (std::exception const&) {
      throw FormatError(source + ": non-numeric grid value '" + token + "'");
    }
  }
  if (g.values.size() != expected) {
    throw FormatError(source + ": expected " + std::to_string(expected) +
                      " grid values, found " + std::to_string(g.values.size()));
  }
  return g;
}

ElevationGrid load_elevation_grid(std::filesystem::path const& path) {
  std::ifstream in{path};
  if (!in) {
    throw FormatError(path.string() + ": cannot open file");
  }
  return parse_elevation_grid(in, path.string());
}

void write_elevation_grid(std::ostream& out, ElevationGrid const& grid) {
  auto const old_precision = out.precision(17);
  out << "ncols " << grid.ncols << '\n'
      << "nrows " << grid.nrows << '\n'
      << "xllcorner " << grid.lower_left.x << '\n'
      << "yllcorner " << grid.lower_left.y << '\n'
      << "cellsize " << grid.cellsize << '\n'
      << "NODATA_value " << grid.nodata << '\n';
  for (int r = 0; r < grid.nrows; ++r) {
    for (int c = 0; c < grid.ncols; ++c) {
      out << (c ? " " : "") << grid.value(r, c);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

std::vector<std::string> orphan_curb_ramps(CurbRampSet const& ramps,
                                           SidewalkSet const& sidewalks,
                                           double const max_distance) {
  std::vector<LocalPoint> ends;
  for (auto const& f : sidewalks.features) {
    if (!f.is_point()) {
      ends.push_back(f.line().front());
      ends.push_back(f.line().back());
    }
  }
  PointIndex const index{ends, std::max(max_distance, 1.0)};
  std::vector<std::string> orphans;
  for (auto const& r : ramps.features) {
    if (r.is_point() && !index.nearest(r.point(), max_distance)) {
      orphans.push_back(r.id);
    }
  }
  return orphans;
}

}  // namespace sidewalk
