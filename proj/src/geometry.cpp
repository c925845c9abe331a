#include "sidewalk/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "sidewalk/error.hpp"

namespace sidewalk {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Parameter slack for endpoint-touching tests on segment intersections.
constexpr double kParamSlack = 1e-12;

}  // namespace

Polyline::Polyline(std::vector<LocalPoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw DegenerateGeometryError("polyline needs at least two points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    auto const p = points_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DegenerateGeometryError("polyline has a non-finite coordinate");
    }
    if (i > 0 && distance(points_[i - 1], p) <= kEpsilon) {
      std::ostringstream msg;
      msg << "polyline vertices " << i - 1 << " and " << i << " coincide";
      throw DegenerateGeometryError(msg.str());
    }
  }
}

std::optional<Polyline> Polyline::cleaned(std::vector<LocalPoint> points) {
  std::vector<LocalPoint> kept;
  kept.reserve(points.size());
  for (auto const p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      return std::nullopt;
    }
    if (kept.empty() || distance(kept.back(), p) > kEpsilon) {
      kept.push_back(p);
    }
  }
  if (kept.size() < 2) {
    return std::nullopt;
  }
  return Polyline{std::move(kept)};
}

Polyline Polyline::reversed() const {
  return Polyline{std::vector<LocalPoint>(points_.rbegin(), points_.rend())};
}

void validate_wgs84(GeoPoint const p) {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || p.lon < -180.0 ||
      p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
    std::ostringstream msg;
    msg << "invalid WGS84 coordinate (" << p.lon << ", " << p.lat << ")";
    throw ExtentError(msg.str());
  }
}

Projection::Projection(GeoPoint const origin)
    : origin_(origin),
      meters_per_lon_rad_(kEarthRadius * std::cos(origin.lat * kDegToRad)) {
  validate_wgs84(origin);
  if (std::abs(origin.lat) > 89.0) {
    throw ExtentError("projection origin too close to a pole");
  }
}

LocalPoint Projection::project(GeoPoint const p) const {
  validate_wgs84(p);
  auto const dlon = p.lon - origin_.lon;
  auto const dlat = p.lat - origin_.lat;
  if (std::abs(dlon) > kMaxProjectionDegrees ||
      std::abs(dlat) > kMaxProjectionDegrees) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "coordinate (" << p.lon << ", " << p.lat
        << ") is more than " << kMaxProjectionDegrees
        << " degrees from the projection origin (" << origin_.lon << ", "
        << origin_.lat << ")";
    throw ExtentError(msg.str());
  }
  return {meters_per_lon_rad_ * dlon * kDegToRad, kEarthRadius * dlat * kDegToRad};
}

GeoPoint Projection::unproject(LocalPoint const p) const {
  return {origin_.lon + p.x / meters_per_lon_rad_ * kRadToDeg,
          origin_.lat + p.y / kEarthRadius * kRadToDeg};
}

LocalPoint project(GeoPoint const p, GeoPoint const origin) {
  return Projection{origin}.project(p);
}

GeoPoint unproject(LocalPoint const p, GeoPoint const origin) {
  return Projection{origin}.unproject(p);
}

double normalize_bearing(double const degrees) {
  auto b = std::fmod(degrees, 360.0);
  if (b < 0.0) {
    b += 360.0;
  }
  if (b >= 360.0) {
    b = 0.0;
  }
  return b;
}

double bearing(LocalPoint const a, LocalPoint const b) {
  if (distance(a, b) <= kEpsilon) {
    throw DegenerateGeometryError("bearing between coincident points");
  }
  return normalize_bearing(std::atan2(b.x - a.x, b.y - a.y) * kRadToDeg);
}

double angle_between_bearings(double const b1, double const b2) {
  auto const d = std::abs(normalize_bearing(b1) - normalize_bearing(b2));
  return d > 180.0 ? 360.0 - d : d;
}

double signed_turn(double const from_bearing, double const to_bearing) {
  auto d = normalize_bearing(to_bearing - from_bearing);
  return d > 180.0 ? d - 360.0 : d;
}

LocalPoint closest_point_on_segment(LocalPoint const p, LocalPoint const a,
                                    LocalPoint const b) {
  auto const ab = b - a;
  auto const len2 = dot(ab, ab);
  if (len2 == 0.0) {
    return a;
  }
  auto const t = dot(p - a, ab) / len2;
  if (t <= 0.0) {
    return a;
  }
  if (t >= 1.0) {
    return b;
  }
  return a + ab * t;
}

double point_segment_distance(LocalPoint const p, LocalPoint const a,
                              LocalPoint const b) {
  return distance(p, closest_point_on_segment(p, a, b));
}

PolylineProjection closest_point_on_polyline(LocalPoint const p,
                                             Polyline const& line) {
  PolylineProjection best{line.front(), std::numeric_limits<double>::infinity(), 0};
  auto const pts = line.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto const q = closest_point_on_segment(p, pts[i], pts[i + 1]);
    auto const d = distance(p, q);
    if (d < best.distance) {
      best = {q, d, i};
    }
  }
  return best;
}

std::optional<LocalPoint> segment_intersection(LocalPoint const a1,
                                               LocalPoint const a2,
                                               LocalPoint const b1,
                                               LocalPoint const b2) {
  // Shared endpoints are reported verbatim so the result is symmetric.
  for (auto const pa : {a1, a2}) {
    for (auto const pb : {b1, b2}) {
      if (pa == pb) {
        return pa;
      }
    }
  }

  auto const r = a2 - a1;
  auto const s = b2 - b1;
  auto const qp = b1 - a1;
  auto const denom = cross(r, s);
  auto const scale = norm(r) * norm(s);

  if (std::abs(denom) <= 1e-12 * scale) {
    // Parallel. Only collinear segments can meet.
    if (std::abs(cross(qp, r)) > 1e-12 * norm(r) * std::max(norm(qp), 1.0)) {
      return std::nullopt;
    }
    auto const len2 = dot(r, r);
    auto const t0 = dot(b1 - a1, r) / len2;
    auto const t1 = dot(b2 - a1, r) / len2;
    auto const lo = std::max(0.0, std::min(t0, t1));
    auto const hi = std::min(1.0, std::max(t0, t1));
    if (lo > hi + kParamSlack) {
      return std::nullopt;
    }
    auto const mid = 0.5 * (lo + hi);
    return a1 + r * mid;
  }

  auto const t = cross(qp, s) / denom;
  auto const u = cross(qp, r) / denom;
  if (t < -kParamSlack || t > 1.0 + kParamSlack || u < -kParamSlack ||
      u > 1.0 + kParamSlack) {
    return std::nullopt;
  }
  if (std::abs(t) <= kParamSlack) return a1;
  if (std::abs(t - 1.0) <= kParamSlack) return a2;
  if (std::abs(u) <= kParamSlack) return b1;
  if (std::abs(u - 1.0) <= kParamSlack) return b2;
  return a1 + r * t;
}

bool segment_crosses_polyline(LocalPoint const a, LocalPoint const b,
                              Polyline const& line) {
  auto const pts = line.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (segment_intersection(a, b, pts[i], pts[i + 1])) {
      return true;
    }
  }
  return false;
}

double segment_distance(LocalPoint const a1, LocalPoint const a2,
                        LocalPoint const b1, LocalPoint const b2) {
  if (segment_intersection(a1, a2, b1, b2)) {
    return 0.0;
  }
  return std::min({point_segment_distance(a1, b1, b2),
                   point_segment_distance(a2, b1, b2),
                   point_segment_distance(b1, a1, a2),
                   point_segment_distance(b2, a1, a2)});
}

double polyline_distance(Polyline const& a, Polyline const& b) {
  auto best = std::numeric_limits<double>::infinity();
  auto const pa = a.points();
  auto const pb = b.points();
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      best = std::min(best, segment_distance(pa[i], pa[i + 1], pb[j], pb[j + 1]));
      if (best == 0.0) {
        return 0.0;
      }
    }
  }
  return best;
}

double point_polyline_distance(LocalPoint const p, Polyline const& line) {
  return closest_point_on_polyline(p, line).distance;
}

double polyline_length(Polyline const& line) {
  auto total = 0.0;
  auto const pts = line.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += distance(pts[i], pts[i + 1]);
  }
  return total;
}

LocalPoint point_along(Polyline const& line, double const offset) {
  if (offset <= 0.0) {
    return line.front();
  }
  auto remaining = offset;
  auto const pts = line.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto const len = distance(pts[i], pts[i + 1]);
    if (remaining <= len) {
      return pts[i] + (pts[i + 1] - pts[i]) * (remaining / len);
    }
    remaining -= len;
  }
  return line.back();
}

std::pair<std::optional<Polyline>, std::optional<Polyline>> split_polyline(
    Polyline const& line, std::size_t const segment_index, LocalPoint const at) {
  auto const pts = line.points();
  std::vector<LocalPoint> head(pts.begin(), pts.begin() + segment_index + 1);
  head.push_back(at);
  std::vector<LocalPoint> tail{at};
  tail.insert(tail.end(), pts.begin() + segment_index + 1, pts.end());
  return {Polyline::cleaned(std::move(head)), Polyline::cleaned(std::move(tail))};
}

}  // namespace sidewalk
