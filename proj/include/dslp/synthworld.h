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

#ifndef DSLP_SYNTHWORLD_H_
#define DSLP_SYNTHWORLD_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dslp/directional.h"
#include "dslp/field.h"
#include "dslp/lane_graph.h"

namespace dslp {

enum class TemplateKind { kStraight, kCurve, kTIntersection, kFourWay, kFork, kMerge };

const char* TemplateName(TemplateKind kind);
// Accepts "straight", "curve", "t", "tjunction", "fourway", "4way", "fork",
// "merge".
TemplateKind ParseTemplate(const std::string& name);
const std::vector<TemplateKind>& AllTemplates();

// Names of the input channels produced by GenerateWorld, in order.
inline const std::vector<std::string>& WorldChannelNames() {
  static const std::vector<std::string> names = {"road", "marking", "appearance"};
  return names;
}

struct WorldTemplate {
  TemplateKind kind = TemplateKind::kStraight;
  int lane_count = 2;        // 1: one-way, 2: two opposing lanes per road
  double lane_width = 6.0;   // cells
  double margin = 1.0;       // road shoulder beyond the outermost lane, cells
  // Turns start this far (fraction of grid size) from the junction center, so
  // in-grid turning lanes are close to a single quadratic arc.
  double turn_radius_fraction = 0.65;
  int grid_size = 128;       // I = J
  double cell_size = 0.4;    // meters per cell
  // Per-seed layout variation.
  bool random_quarter_turns = true;
  double max_rotation_jitter = 0.2;  // radians
  double max_center_offset = 0.08;   // fraction of grid size
  // Occluded fraction of the partial world ~ U[min, max].
  double min_occlusion = 0.1;
  double max_occlusion = 0.3;
  int direction_bins = kDefaultDirectionBins;
  double kappa = kDefaultVonMisesKappa;
  double appearance_noise = 0.05;

  // Defaults for the template kind (fork and merge are one-way roads).
  static WorldTemplate For(TemplateKind kind, int grid_size = 128);
  // Throws std::invalid_argument when lanes cannot fit inside the grid.
  void Validate() const;
};

struct Route {
  Polyline centerline;  // dense, extends beyond the grid on both ends
  Polyline clipped;     // portion inside the grid
};

struct GroundTruth {
  GridField p_true;
  DirField dir_true;
  LaneGraph lane_graph_true;
  GridField lane_raster_true;  // p_true > 0.5
  GridField road_region;       // complete road >= 0.5
  LayeredWorld complete_world;
  std::vector<Route> routes;
  double lane_width = 0.0;
  double sigma = 0.0;  // lateral std of the p_true profile

  // Throws std::logic_error if any invariant is broken.
  void CheckInvariants() const;
};

struct GeneratedWorld {
  LayeredWorld partial;  // occluded channels, observation_mask marks context
  GroundTruth truth;
};

GeneratedWorld GenerateWorld(const WorldTemplate& tmpl, std::uint64_t seed);

struct ObservationConfig {
  double route_coverage = 0.3;   // rho in (0, 1]
  int trajectories_per_route = 5;
  double lateral_noise = -1.0;   // sigma_n; negative -> lane_width / 6
};

// Number of observed routes: ceil(rho * R), at least 1.
int ObservedRouteCount(double route_coverage, int route_count);

struct SampledObservations {
  ObservationSet obs;              // supervised region = truth.road_region
  std::vector<int> observed_routes;  // indices into truth.routes, sorted
};

SampledObservations SampleObservations(const GroundTruth& truth,
                                       const ObservationConfig& config,
                                       std::uint64_t seed);

// One trajectory along a route: constant lateral offset plus smooth lateral
// noise of std `noise_sigma`.
Polyline SampleTrajectory(const Route& route, double lateral_offset,
                          double noise_sigma, std::mt19937_64& rng);

// Lateral std of the per-trajectory offset that makes the cell-visit profile
// of a route match its p_true cross-section.
double TrajectoryOffsetSigma(double profile_sigma, double noise_sigma);

enum class CompletionMode { kOracle, kNoisy, kPassthrough };
CompletionMode ParseCompletionMode(const std::string& name);
const char* CompletionModeName(CompletionMode mode);

// Fills occluded cells of `partial`. Oracle copies the complete world, noisy
// adds N(0, noise_sigma) channel noise to the copied values (clipped to
// [0, 1]), passthrough returns the input unchanged.
LayeredWorld CompleteWorld(const LayeredWorld& partial, const GroundTruth& truth,
                           CompletionMode mode, double noise_sigma,
                           std::uint64_t seed);

// (start, end) of every route's in-grid portion.
std::vector<std::pair<Point, Point>> RouteEndpoints(const GroundTruth& truth);

}  // namespace dslp

#endif  // DSLP_SYNTHWORLD_H_
