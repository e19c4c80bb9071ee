/* Copyright 2026 The DSLP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dslp/field.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dslp {

GridField::GridField(int width, int height, double cell_size, double fill)
    : GridField(width, height, cell_size,
                std::vector<double>(static_cast<std::size_t>(
                                        std::max(width, 0)) *
                                        static_cast<std::size_t>(
                                            std::max(height, 0)),
                                    fill)) {}

GridField::GridField(int width, int height, double cell_size,
                     std::vector<double> values)
    : dims_{width, height}, cell_size_(cell_size), values_(std::move(values)) {
  if (width < kMinGridExtent || height < kMinGridExtent) {
    throw std::invalid_argument("grid extent must be at least 8x8");
  }
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("cell_size must be positive");
  }
  if (values_.size() != dims_.size()) {
    throw std::invalid_argument("value count does not match grid extent");
  }
}

double GridField::Sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

std::size_t GridField::CountSet() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [](double v) { return v >= 0.5; }));
}

bool IsProbabilityField(const GridField& field) {
  for (double v : field.values()) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return true;
}

bool IsBinaryField(const GridField& field) {
  for (double v : field.values()) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

void CheckProbabilityField(const GridField& field, const char* what) {
  if (!IsProbabilityField(field)) {
    throw std::logic_error(std::string("probability field out of [0,1]: ") +
                           what);
  }
}

const GridField& LayeredWorld::channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.name == name) return c.field;
  }
  throw std::out_of_range("no channel named '" + name + "'");
}

GridField& LayeredWorld::channel(const std::string& name) {
  for (auto& c : channels) {
    if (c.name == name) return c.field;
  }
  throw std::out_of_range("no channel named '" + name + "'");
}

bool LayeredWorld::has_channel(const std::string& name) const {
  return std::any_of(channels.begin(), channels.end(),
                     [&](const NamedChannel& c) { return c.name == name; });
}

void LayeredWorld::Validate() const {
  for (const auto& c : channels) {
    if (!c.field.SameGeometry(observation_mask)) {
      throw std::invalid_argument("channel '" + c.name +
                                  "' does not match world geometry");
    }
  }
}

GridField ObservationSet::Region() const {
  GridField region = pos_mask;
  for (std::size_t k = 0; k < region.size(); ++k) region[k] += neg_mask[k];
  return region;
}

double PointSegmentDistance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double ex = a.x + t * dx - p.x;
  const double ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

double PointPolylineDistance(Point p, std::span<const Point> polyline) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) {
    return std::hypot(p.x - polyline[0].x, p.y - polyline[0].y);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    best = std::min(best, PointSegmentDistance(p, polyline[k], polyline[k + 1]));
  }
  return best;
}

namespace {

// Ties at exactly the radius count as covered.
constexpr double kCoverSlack = 1e-12;

template <typename Visit>
void ForEachCoveredCell(Point a, Point b, double radius, GridDims dims,
                        Visit&& visit) {
  const int i0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius)));
  const int i1 = std::min(dims.width - 1,
                          static_cast<int>(std::ceil(std::max(a.x, b.x) + radius)));
  const int j0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius)));
  const int j1 = std::min(dims.height - 1,
                          static_cast<int>(std::ceil(std::max(a.y, b.y) + radius)));
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Point c{static_cast<double>(i), static_cast<double>(j)};
      if (PointSegmentDistance(c, a, b) <= radius + kCoverSlack) visit(i, j);
    }
  }
}

Polyline Dedup(std::span<const Point> polyline) {
  Polyline out;
  out.reserve(polyline.size());
  for (const Point& p : polyline) {
    if (out.empty() || out.back().x != p.x || out.back().y != p.y) {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::vector<Cell> RasterizeTrajectory(std::span<const Point> polyline,
                                      GridDims dims) {
  const Polyline pts = Dedup(polyline);
  if (pts.size() < 2) throw std::invalid_argument("degenerate trajectory");
  std::vector<std::uint8_t> hit(dims.size(), 0);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    ForEachCoveredCell(pts[k], pts[k + 1], 0.5, dims, [&](int i, int j) {
      hit[static_cast<std::size_t>(j) * dims.width + i] = 1;
    });
  }
  std::vector<Cell> cells;
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      if (hit[static_cast<std::size_t>(j) * dims.width + i]) cells.push_back({i, j});
    }
  }
  return cells;
}

void BurnPolyline(std::span<const Point> polyline, double radius,
                  GridField& target, double value) {
  const Polyline pts = Dedup(polyline);
  if (pts.empty()) return;
  auto mark = [&](int i, int j) { target.at(i, j) = value; };
  if (pts.size() == 1) {
    ForEachCoveredCell(pts[0], pts[0], radius, target.dims(), mark);
    return;
  }
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    ForEachCoveredCell(pts[k], pts[k + 1], radius, target.dims(), mark);
  }
}

ObservationSet BuildObservationSet(std::vector<Polyline> trajectories,
                                   const GridField& supervised_region) {
  ObservationSet obs;
  obs.pos_mask = GridField(supervised_region.dims(),
                           supervised_region.cell_size(), 0.0);
  obs.neg_mask = obs.pos_mask;
  GridField traversed = obs.pos_mask;
  for (const Polyline& t : trajectories) {
    for (const Cell& c : RasterizeTrajectory(t, traversed.dims())) {
      traversed.at(c.i, c.j) = 1.0;
    }
  }
  for (std::size_t k = 0; k < supervised_region.size(); ++k) {
    if (supervised_region[k] < 0.5) continue;
    if (traversed[k] >= 0.5) {
      obs.pos_mask[k] = 1.0;
    } else {
      obs.neg_mask[k] = 1.0;
    }
  }
  obs.trajectories = std::move(trajectories);
  return obs;
}

GridField ThresholdMask(const GridField& field, double threshold) {
  GridField out(field.dims(), field.cell_size(), 0.0);
  for (std::size_t k = 0; k < field.size(); ++k) {
    out[k] = field[k] >= threshold ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace dslp
