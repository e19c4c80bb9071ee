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

#include "dslp/augment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dslp {

AxisWarp AxisWarp::FromDisplacement(double displacement, double extent) {
  if (!(extent > 0.0)) throw std::invalid_argument("warp extent must be positive");
  AxisWarp w;
  w.displacement = displacement;
  w.extent = extent;
  w.a2 = 0.0;
  w.a0 = -4.0 * displacement / (extent * extent);
  w.a1 = 1.0 + 4.0 * displacement / extent;
  return w;
}

std::optional<double> AxisWarp::Inverse(double warped) const {
  const double c = a2 - warped;
  const double disc = a1 * a1 - 4.0 * a0 * c;
  if (disc < 0.0) return std::nullopt;
  const double denom = a1 + std::sqrt(disc);
  if (denom == 0.0) return std::nullopt;
  return -2.0 * c / denom;
}

bool AxisWarp::IsMonotone() const {
  // Linear derivative: checking both ends covers the interval.
  return Derivative(0.0) > 0.0 && Derivative(extent) > 0.0;
}

WarpSpec WarpSpec::Identity(GridDims dims) {
  WarpSpec s;
  s.dims = dims;
  s.x = AxisWarp::FromDisplacement(0.0, dims.width - 1.0);
  s.y = AxisWarp::FromDisplacement(0.0, dims.height - 1.0);
  return s;
}

Point WarpSpec::Forward(Point p) const {
  const double cx = (dims.width - 1) * 0.5;
  const double cy = (dims.height - 1) * 0.5;
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double dx = p.x - cx;
  const double dy = p.y - cy;
  const double qx = c * dx - s * dy + cx + translate_x;
  const double qy = s * dx + c * dy + cy + translate_y;
  return {x.Forward(qx), y.Forward(qy)};
}

std::optional<Point> WarpSpec::Inverse(Point p) const {
  const auto qx = x.Inverse(p.x);
  const auto qy = y.Inverse(p.y);
  if (!qx || !qy) return std::nullopt;
  const double cx = (dims.width - 1) * 0.5;
  const double cy = (dims.height - 1) * 0.5;
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double dx = *qx - cx - translate_x;
  const double dy = *qy - cy - translate_y;
  return Point{c * dx + s * dy + cx, -s * dx + c * dy + cy};
}

WarpLimits WarpLimits::Defaults(GridDims dims) {
  WarpLimits l;
  l.max_mid_displacement = dims.width / 16.0;
  l.max_rotation = 2.0 * std::numbers::pi;
  l.max_translation = dims.width / 8.0;
  return l;
}

WarpSpec SampleWarp(std::mt19937_64& rng, const WarpLimits& limits,
                    GridDims dims) {
  WarpSpec spec = WarpSpec::Identity(dims);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto symmetric = [&](double bound) { return bound * (2.0 * unit(rng) - 1.0); };
  auto draw_axis = [&](double extent) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      AxisWarp w = AxisWarp::FromDisplacement(
          symmetric(limits.max_mid_displacement), extent);
      if (w.IsMonotone()) return w;
    }
    throw std::runtime_error("cannot sample a monotone warp after 100 rejections");
  };
  spec.x = draw_axis(dims.width - 1.0);
  spec.y = draw_axis(dims.height - 1.0);
  spec.rotation = limits.max_rotation * unit(rng);
  spec.translate_x = symmetric(limits.max_translation);
  spec.translate_y = symmetric(limits.max_translation);
  return spec;
}

WarpSpec SampleWarp(std::uint64_t seed, const WarpLimits& limits, GridDims dims) {
  std::mt19937_64 rng(seed);
  WarpSpec spec = SampleWarp(rng, limits, dims);
  spec.seed = seed;
  return spec;
}

WarpMaps BuildWarpMaps(const WarpSpec& spec) {
  WarpMaps maps;
  maps.dims = spec.dims;
  maps.source.resize(spec.dims.size());
  maps.valid.assign(spec.dims.size(), 0);
  const double max_x = spec.dims.width - 0.5;
  const double max_y = spec.dims.height - 0.5;
  for (int j = 0; j < spec.dims.height; ++j) {
    for (int i = 0; i < spec.dims.width; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * spec.dims.width + i;
      const auto src = spec.Inverse({double(i), double(j)});
      if (!src) continue;
      maps.source[k] = *src;
      maps.valid[k] = src->x >= -0.5 && src->x < max_x && src->y >= -0.5 &&
                      src->y < max_y;
    }
  }
  return maps;
}

GridField ResampleBilinear(const GridField& field, const WarpMaps& maps) {
  GridField out(field.dims(), field.cell_size(), 0.0);
  const int w = field.width();
  const int h = field.height();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!maps.valid[k]) continue;
    const double sx = std::clamp(maps.source[k].x, 0.0, w - 1.0);
    const double sy = std::clamp(maps.source[k].y, 0.0, h - 1.0);
    const int i0 = static_cast<int>(std::floor(sx));
    const int j0 = static_cast<int>(std::floor(sy));
    const double fx = sx - i0;
    const double fy = sy - j0;
    const int i1 = fx > 0.0 ? i0 + 1 : i0;
    const int j1 = fy > 0.0 ? j0 + 1 : j0;
    const double top = field.at(i0, j0) * (1.0 - fx) + field.at(i1, j0) * fx;
    const double bottom = field.at(i0, j1) * (1.0 - fx) + field.at(i1, j1) * fx;
    out[k] = top * (1.0 - fy) + bottom * fy;
  }
  return out;
}

GridField ResampleNearest(const GridField& field, const WarpMaps& maps) {
  GridField out(field.dims(), field.cell_size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!maps.valid[k]) continue;
    const int i = std::clamp(static_cast<int>(std::lround(maps.source[k].x)), 0,
                             field.width() - 1);
    const int j = std::clamp(static_cast<int>(std::lround(maps.source[k].y)), 0,
                             field.height() - 1);
    out[k] = field.at(i, j);
  }
  return out;
}

Polyline Densify(const Polyline& polyline, double step) {
  if (polyline.size() < 2) return polyline;
  Polyline out;
  out.push_back(polyline.front());
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    const Point a = polyline[k];
    const Point b = polyline[k + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int s = 1; s <= n; ++s) {
      const double t = static_cast<double>(s) / n;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

Polyline WarpPolyline(const Polyline& polyline, const WarpSpec& spec) {
  Polyline out;
  const Polyline dense = Densify(polyline, 0.5);
  out.reserve(dense.size());
  for (const Point& p : dense) out.push_back(spec.Forward(p));
  return out;
}

std::pair<LayeredWorld, ObservationSet> WarpWorld(const LayeredWorld& world,
                                                  const ObservationSet& obs,
                                                  const WarpSpec& spec) {
  if (!(spec.dims == world.dims())) {
    throw std::invalid_argument("warp dimensions do not match world");
  }
  const WarpMaps maps = BuildWarpMaps(spec);
  LayeredWorld out;
  for (const auto& c : world.channels) {
    out.channels.push_back({c.name, ResampleBilinear(c.field, maps)});
  }
  out.observation_mask = ResampleNearest(world.observation_mask, maps);
  const GridField region = ResampleNearest(obs.Region(), maps);
  std::vector<Polyline> warped;
  warped.reserve(obs.trajectories.size());
  for (const Polyline& t : obs.trajectories) warped.push_back(WarpPolyline(t, spec));
  ObservationSet out_obs = BuildObservationSet(std::move(warped), region);
  return {std::move(out), std::move(out_obs)};
}

}  // namespace dslp
