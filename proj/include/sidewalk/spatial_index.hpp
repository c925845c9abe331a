#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sidewalk/geometry.hpp"

namespace sidewalk {

// Uniform hash grid over a fixed point set. Point indices refer to the span
// passed at construction.
class PointIndex {
 public:
  PointIndex() = default;
  explicit PointIndex(std::span<LocalPoint const> points, double cell_size = 25.0);

  std::size_t size() const { return points_.size(); }

  // Indices of all points with distance <= radius, ascending.
  std::vector<std::size_t> within(LocalPoint center, double radius) const;

  // Nearest point within max_radius; ties go to the lowest index.
  std::optional<std::size_t> nearest(LocalPoint center, double max_radius) const;

 private:
  using CellKey = std::int64_t;

  CellKey key(std::int64_t cx, std::int64_t cy) const;
  std::int64_t cell_of(double v) const;

  std::vector<LocalPoint> points_;
  double cell_size_ = 25.0;
  std::unordered_map<CellKey, std::vector<std::size_t>> cells_;
};

}  // namespace sidewalk

namespace sidewalk {

// Assigns incoming points to anchors: a point within `tolerance` of an
// existing anchor (nearest, then lowest id) reuses it, otherwise it becomes a
// new anchor. The first point seen fixes each anchor's location.
class PointSnapper {
 public:
  explicit PointSnapper(double tolerance);

  std::size_t snap(LocalPoint p);
  std::span<LocalPoint const> anchors() const { return anchors_; }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(LocalPoint p) const;

  double tolerance_;
  double cell_;
  std::vector<LocalPoint> anchors_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

}  // namespace sidewalk
