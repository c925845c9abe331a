#include "sidewalk/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sidewalk {

PointIndex::PointIndex(std::span<LocalPoint const> points, double const cell_size)
    : points_(points.begin(), points.end()), cell_size_(cell_size) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    cells_[key(cell_of(points_[i].x), cell_of(points_[i].y))].push_back(i);
  }
}

PointIndex::CellKey PointIndex::key(std::int64_t const cx,
                                    std::int64_t const cy) const {
  return (cx << 32) ^ (cy & 0xffffffffLL);
}

std::int64_t PointIndex::cell_of(double const v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

std::vector<std::size_t> PointIndex::within(LocalPoint const center,
                                            double const radius) const {
  std::vector<std::size_t> out;
  if (points_.empty() || radius < 0.0 || !std::isfinite(radius)) {
    if (std::isinf(radius) && radius > 0.0) {
      out.resize(points_.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    }
    return out;
  }
  auto const x0 = cell_of(center.x - radius);
  auto const x1 = cell_of(center.x + radius);
  auto const y0 = cell_of(center.y - radius);
  auto const y1 = cell_of(center.y + radius);
  auto const cell_count = static_cast<double>(x1 - x0 + 1) *
                          static_cast<double>(y1 - y0 + 1);
  if (cell_count > static_cast<double>(cells_.size())) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (distance(points_[i], center) <= radius) {
        out.push_back(i);
      }
    }
    return out;
  }
  for (auto cx = x0; cx <= x1; ++cx) {
    for (auto cy = y0; cy <= y1; ++cy) {
      auto const it = cells_.find(key(cx, cy));
      if (it == cells_.end()) {
        continue;
      }
      for (auto const i : it->second) {
        if (distance(points_[i], center) <= radius) {
          out.push_back(i);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> PointIndex::nearest(LocalPoint const center,
                                               double const max_radius) const {
  std::optional<std::size_t> best;
  auto best_d = std::numeric_limits<double>::infinity();
  for (auto const i : within(center, max_radius)) {
    auto const d = distance(points_[i], center);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace sidewalk

namespace sidewalk {

PointSnapper::PointSnapper(double const tolerance)
    : tolerance_(tolerance), cell_(std::max(tolerance, 1e-3)) {}

std::pair<std::int64_t, std::int64_t> PointSnapper::cell_of(LocalPoint const p) const {
  return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
          static_cast<std::int64_t>(std::floor(p.y / cell_))};
}

std::size_t PointSnapper::snap(LocalPoint const p) {
  auto const [cx, cy] = cell_of(p);
  auto const key = [](std::int64_t x, std::int64_t y) {
    return (x << 32) ^ (y & 0xffffffffLL);
  };
  std::optional<std::size_t> best;
  auto best_d = std::numeric_limits<double>::infinity();
  for (auto dx = -1; dx <= 1; ++dx) {
    for (auto dy = -1; dy <= 1; ++dy) {
      auto const it = cells_.find(key(cx + dx, cy + dy));
      if (it == cells_.end()) continue;
      for (auto const a : it->second) {
        auto const d = distance(anchors_[a], p);
        if (d <= tolerance_ && (d < best_d || (d == best_d && a < *best))) {
          best = a;
          best_d = d;
        }
      }
    }
  }
  if (best) {
    return *best;
  }
  anchors_.push_back(p);
  cells_[key(cx, cy)].push_back(anchors_.size() - 1);
  return anchors_.size() - 1;
}

}  // namespace sidewalk
