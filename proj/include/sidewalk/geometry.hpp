#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sidewalk {

inline constexpr double kEarthRadius = 6371008.8;  // mean radius, meters
inline constexpr double kEpsilon = 1e-6;           // coincidence tolerance, meters
inline constexpr double kMaxProjectionDegrees = 2.0;

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(GeoPoint const&, GeoPoint const&) = default;
};

// Meters east (x) and north (y) of a projection origin.
struct LocalPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(LocalPoint const&, LocalPoint const&) = default;

  LocalPoint operator+(LocalPoint const o) const { return {x + o.x, y + o.y}; }
  LocalPoint operator-(LocalPoint const o) const { return {x - o.x, y - o.y}; }
  LocalPoint operator*(double const s) const { return {x * s, y * s}; }
};

inline double dot(LocalPoint const a, LocalPoint const b) {
  return a.x * b.x + a.y * b.y;
}
inline double cross(LocalPoint const a, LocalPoint const b) {
  return a.x * b.y - a.y * b.x;
}
inline double norm(LocalPoint const v) { return std::hypot(v.x, v.y); }
inline double distance(LocalPoint const a, LocalPoint const b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Ordered vertex list with at least two points, consecutive points further
// apart than kEpsilon. Construction throws DegenerateGeometryError otherwise.
class Polyline {
 public:
  explicit Polyline(std::vector<LocalPoint> points);
  Polyline(std::initializer_list<LocalPoint> points)
      : Polyline(std::vector<LocalPoint>(points)) {}

  // Drops consecutive near-duplicate vertices before validating.
  static std::optional<Polyline> cleaned(std::vector<LocalPoint> points);

  std::span<LocalPoint const> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  LocalPoint front() const { return points_.front(); }
  LocalPoint back() const { return points_.back(); }
  LocalPoint operator[](std::size_t i) const { return points_[i]; }

  Polyline reversed() const;

  friend bool operator==(Polyline const&, Polyline const&) = default;

 private:
  std::vector<LocalPoint> points_;
};

// Equirectangular projection about a fixed origin. Inputs further than
// kMaxProjectionDegrees from the origin raise ExtentError.
class Projection {
 public:
  explicit Projection(GeoPoint origin);

  GeoPoint origin() const { return origin_; }
  LocalPoint project(GeoPoint p) const;
  GeoPoint unproject(LocalPoint p) const;

 private:
  GeoPoint origin_;
  double meters_per_lon_rad_;
};

void validate_wgs84(GeoPoint p);

LocalPoint project(GeoPoint p, GeoPoint origin);
GeoPoint unproject(LocalPoint p, GeoPoint origin);

// Clockwise-from-north bearing in [0, 360).
double bearing(LocalPoint a, LocalPoint b);

double normalize_bearing(double degrees);

// Unsigned separation of two bearings, in [0, 180].
double angle_between_bearings(double b1, double b2);

// Signed turn from one heading to another in (-180, 180]; positive is a
// clockwise (right) turn.
double signed_turn(double from_bearing, double to_bearing);

struct PolylineProjection {
  LocalPoint point;
  double distance = 0.0;
  std::size_t segment_index = 0;
};

LocalPoint closest_point_on_segment(LocalPoint p, LocalPoint a, LocalPoint b);
double point_segment_distance(LocalPoint p, LocalPoint a, LocalPoint b);

PolylineProjection closest_point_on_polyline(LocalPoint p, Polyline const& line);

// Intersection of closed segments a1-a2 and b1-b2. Touching endpoints count;
// collinear overlaps report the midpoint of the shared interval.
std::optional<LocalPoint> segment_intersection(LocalPoint a1, LocalPoint a2,
                                               LocalPoint b1, LocalPoint b2);

bool segment_crosses_polyline(LocalPoint a, LocalPoint b, Polyline const& line);

double segment_distance(LocalPoint a1, LocalPoint a2, LocalPoint b1,
                        LocalPoint b2);
double polyline_distance(Polyline const& a, Polyline const& b);
double point_polyline_distance(LocalPoint p, Polyline const& line);

double polyline_length(Polyline const& line);

// Point at arc length `offset` from the start, clamped to the polyline.
LocalPoint point_along(Polyline const& line, double offset);

// Splits `line` at `at`, which must lie on segment `segment_index`. Returns
// nullopt for a piece that would be degenerate (split at an endpoint).
std::pair<std::optional<Polyline>, std::optional<Polyline>> split_polyline(
    Polyline const& line, std::size_t segment_index, LocalPoint at);

}  // namespace sidewalk
