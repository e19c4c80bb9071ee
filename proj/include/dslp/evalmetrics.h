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

#ifndef DSLP_EVALMETRICS_H_
#define DSLP_EVALMETRICS_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "dslp/dgf.h"
#include "dslp/directional.h"
#include "dslp/field.h"
#include "dslp/lane_graph.h"

namespace dslp {

struct GroundTruth;

// Every edge polyline drawn with a disk brush of radius width_cells / 2.
GridField RasterizeGraph(const LaneGraph& graph, GridDims dims, double cell_size,
                         double width_cells);

struct IouF1 {
  double iou = 0.0;
  double f1 = 0.0;
};

// Cells >= 0.5 count as set. An empty union gives iou = f1 = 1.
IouF1 ComputeIouF1(const GridField& pred, const GridField& truth);

// Ground truth needed for evaluation.
struct EvalTruth {
  GridField lane_raster;
  GridField road_region;
  DirField dir_true;
  double lane_width = 0.0;

  static EvalTruth From(const GroundTruth& truth);
  // Reads gt_lane_raster, gt_road_region, gt_dir_* and the lane width stored
  // in the file. Throws std::runtime_error("missing ground truth") when absent.
  static EvalTruth FromDgf(const DgfFile& file);
};

struct SampleMetrics {
  double nll_slp = 0.0;
  double nll_dp = 0.0;
  double nll_total = 0.0;
  double dir_acc = 0.0;
  double iou = 0.0;
  double f1 = 0.0;

  nlohmann::json ToJson() const;
};

struct EvalConfig {
  double raster_width = 0.0;  // cells; <= 0 uses the lane width
};

SampleMetrics EvaluateSample(const GridField& y_hat, const DirField& w_hat,
                             const LaneGraph& graph, const EvalTruth& truth,
                             const EvalConfig& config = {});

struct EvalReport {
  SampleMetrics mean;
  SampleMetrics stddev;  // sample standard deviation, 0 for a single sample
  std::vector<SampleMetrics> samples;

  // Aggregates are computed over sorted values, so they do not depend on the
  // sample order.
  static EvalReport Aggregate(std::vector<SampleMetrics> samples);
  nlohmann::json ToJson() const;
};

}  // namespace dslp

#endif  // DSLP_EVALMETRICS_H_
