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

#ifndef DSLP_GRAPHGEN_H_
#define DSLP_GRAPHGEN_H_

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dslp/directional.h"
#include "dslp/field.h"
#include "dslp/lane_graph.h"

namespace dslp {

enum class BoundarySide { kWest, kEast, kSouth, kNorth };  // i=0, i=I-1, j=0, j=J-1

const char* BoundarySideName(BoundarySide side);

struct Endpoint {
  Point position;          // on the outermost cell line
  BoundarySide side = BoundarySide::kWest;
  double direction = 0.0;  // dominant mode angle used for classification
};

struct EndpointSet {
  std::vector<Endpoint> entries;
  std::vector<Endpoint> exits;
};

struct GraphConfig {
  int nms_window = 5;
  double slp_threshold = 0.3;
  int boundary_band = 2;           // cells inspected inward from each side
  double coherence_variance = 0.2;
  int n_samples = 64;              // candidates per pair, straight line included
  int eval_points = 32;
  double min_slp = 0.05;           // rejection floor for traversed cells
  double nll_accept_threshold = 3.0;  // mean per-point NLL
  double uturn_distance = 8.0;        // cells; usually 2 * lane width
  std::uint64_t seed = 0;
  int jobs = 1;

  nlohmann::json ToJson() const;
};

EndpointSet FindEndpoints(const GridField& y_hat, const DirField& w_hat,
                          const GraphConfig& config);

// Quadratic Bezier through `control`, sampled at `count` arc-length
// equidistant points (first and last are the endpoints).
Polyline SampleQuadratic(Point start, Point control, Point end, int count);

// Summed NLL of the path: -log y_hat (bilinear) plus -log of the direction bin
// containing the local tangent, over `eval_points` points.
double ScorePath(Point start, Point control, Point end, const GridField& y_hat,
                 const DirField& w_hat, int eval_points);

// False if the control point or any traversed cell lies outside the grid or on
// a cell with y_hat below `min_slp`.
bool IsValidControl(Point start, Point control, Point end,
                    const GridField& y_hat, double min_slp);

struct PathResult {
  Polyline polyline;
  Point control;
  double nll = 0.0;   // summed over the evaluation points
  int candidate = 0;  // 0 is the straight line
};

// Throws std::invalid_argument for coincident endpoints and
// std::runtime_error("no valid path") when every candidate is rejected.
PathResult SamplePath(Point entry, Point exit, const GridField& y_hat,
                      const DirField& w_hat, const GraphConfig& config,
                      std::uint64_t seed);

LaneGraph BuildGraph(const EndpointSet& endpoints, const GridField& y_hat,
                     const DirField& w_hat, const GraphConfig& config);

// FindEndpoints followed by BuildGraph.
LaneGraph FitLaneGraph(const GridField& y_hat, const DirField& w_hat,
                       const GraphConfig& config);

}  // namespace dslp

#endif  // DSLP_GRAPHGEN_H_
