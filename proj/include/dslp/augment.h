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

#ifndef DSLP_AUGMENT_H_
#define DSLP_AUGMENT_H_

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "dslp/field.h"

namespace dslp {

// Quadratic warp of one axis: warped = a0 * x^2 + a1 * x + a2, defined over
// [0, extent]. Built from three boundary conditions: both ends fixed and the
// midpoint shifted by `displacement`.
struct AxisWarp {
  double a0 = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;
  double displacement = 0.0;
  double extent = 1.0;

  static AxisWarp FromDisplacement(double displacement, double extent);
  double Forward(double x) const { return (a0 * x + a1) * x + a2; }
  double Derivative(double x) const { return 2.0 * a0 * x + a1; }
  // Root on the monotone branch; nullopt when no real root exists.
  std::optional<double> Inverse(double warped) const;
  // Derivative strictly positive over [0, extent].
  bool IsMonotone() const;
};

// Rigid transform about the grid center followed by per-axis quadratic warps.
struct WarpSpec {
  AxisWarp x;
  AxisWarp y;
  double rotation = 0.0;  // radians
  double translate_x = 0.0;
  double translate_y = 0.0;
  std::uint64_t seed = 0;
  GridDims dims;

  static WarpSpec Identity(GridDims dims);
  // Original grid coordinates -> augmented grid coordinates.
  Point Forward(Point p) const;
  // Augmented -> original; nullopt if an axis warp has no inverse there.
  std::optional<Point> Inverse(Point p) const;
  bool IsMonotone() const { return x.IsMonotone() && y.IsMonotone(); }
};

struct WarpLimits {
  double max_mid_displacement = 0.0;  // cells; default extent / 16
  double max_rotation = 0.0;          // rotation ~ U[0, max_rotation)
  double max_translation = 0.0;       // cells; translation ~ U[-t, t]

  static WarpLimits Defaults(GridDims dims);
};

// Draws a warp; displacements are re-drawn until monotone, and after 100
// rejections std::runtime_error is thrown.
WarpSpec SampleWarp(std::mt19937_64& rng, const WarpLimits& limits,
                    GridDims dims);
WarpSpec SampleWarp(std::uint64_t seed, const WarpLimits& limits, GridDims dims);

// Dense inverse map: for each augmented cell, the source coordinate in the
// original grid. Sources outside the original grid are invalid.
struct WarpMaps {
  GridDims dims;
  std::vector<Point> source;
  std::vector<std::uint8_t> valid;
};

WarpMaps BuildWarpMaps(const WarpSpec& spec);

GridField ResampleBilinear(const GridField& field, const WarpMaps& maps);
GridField ResampleNearest(const GridField& field, const WarpMaps& maps);

// Resamples polyline at <= `step` spacing so that a nonlinear warp bends it.
Polyline Densify(const Polyline& polyline, double step);
Polyline WarpPolyline(const Polyline& polyline, const WarpSpec& spec);

// Continuous channels are resampled bilinearly, masks by nearest neighbour.
// Trajectories are warped with the forward transform and re-rasterized
// against the warped supervised region. Invalid cells lose their context.
std::pair<LayeredWorld, ObservationSet> WarpWorld(const LayeredWorld& world,
                                                  const ObservationSet& obs,
                                                  const WarpSpec& spec);

}  // namespace dslp

#endif  // DSLP_AUGMENT_H_
