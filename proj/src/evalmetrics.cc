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

#include "dslp/evalmetrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dslp/objective.h"
#include "dslp/synthworld.h"

namespace dslp {
namespace {

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

Stat Summarize(std::vector<double> values) {
  Stat s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (values.size() - 1));
  }
  return s;
}

}  // namespace

GridField RasterizeGraph(const LaneGraph& graph, GridDims dims, double cell_size,
                         double width_cells) {
  GridField raster(dims, cell_size, 0.0);
  for (const LaneEdge& e : graph.edges) BurnPolyline(e.polyline, width_cells / 2.0, raster);
  return raster;
}

IouF1 ComputeIouF1(const GridField& pred, const GridField& truth) {
  if (pred.dims() != truth.dims()) throw std::invalid_argument("raster dims differ");
  std::size_t inter = 0, uni = 0, n_pred = 0, n_true = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const bool p = pred[k] >= 0.5;
    const bool t = truth[k] >= 0.5;
    inter += p && t;
    uni += p || t;
    n_pred += p;
    n_true += t;
  }
  if (uni == 0) return {1.0, 1.0};
  return {static_cast<double>(inter) / uni,
          2.0 * static_cast<double>(inter) / static_cast<double>(n_pred + n_true)};
}

EvalTruth EvalTruth::From(const GroundTruth& truth) {
  return {truth.lane_raster_true, truth.road_region, truth.dir_true, truth.lane_width};
}

EvalTruth EvalTruth::FromDgf(const DgfFile& file) {
  if (!file.Has("gt_lane_raster") || !file.Has("gt_road_region") ||
      !HasDirField(file, "gt_")) {
    throw std::runtime_error("missing ground truth");
  }
  EvalTruth t;
  t.lane_raster = file.Get("gt_lane_raster");
  t.road_region = file.Get("gt_road_region");
  t.dir_true = GetDirField(file, "gt_");
  // Lane width is stored as a constant channel.
  t.lane_width = file.Has("gt_lane_width") ? file.Get("gt_lane_width")[0] : 0.0;
  return t;
}

nlohmann::json SampleMetrics::ToJson() const {
  return {{"nll_slp", nll_slp}, {"nll_dp", nll_dp}, {"nll_total", nll_total},
          {"dir_acc", dir_acc}, {"iou", iou},       {"f1", f1}};
}

SampleMetrics EvaluateSample(const GridField& y_hat, const DirField& w_hat,
                             const LaneGraph& graph, const EvalTruth& truth,
                             const EvalConfig& config) {
  if (y_hat.dims() != truth.lane_raster.dims() || w_hat.dims() != truth.dir_true.dims()) {
    throw std::invalid_argument("prediction and ground truth dims differ");
  }
  SampleMetrics m;
  m.nll_slp = NllSlp(truth.lane_raster, y_hat, truth.road_region);
  m.nll_dp = NllDp(truth.dir_true, w_hat, truth.lane_raster);
  m.nll_total = m.nll_slp + m.nll_dp;
  m.dir_acc = DirectionalAccuracy(truth.dir_true, w_hat, truth.lane_raster);
  const double width = config.raster_width > 0.0 ? config.raster_width : truth.lane_width;
  if (!(width > 0.0)) throw std::invalid_argument("graph raster width must be positive");
  const GridField raster = RasterizeGraph(graph, y_hat.dims(), y_hat.cell_size(), width);
  const IouF1 s = ComputeIouF1(raster, truth.lane_raster);
  m.iou = s.iou;
  m.f1 = s.f1;
  return m;
}

EvalReport EvalReport::Aggregate(std::vector<SampleMetrics> samples) {
  EvalReport r;
  auto field = [&](double SampleMetrics::*member) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.*member);
    const Stat st = Summarize(std::move(v));
    r.mean.*member = st.mean;
    r.stddev.*member = st.stddev;
  };
  field(&SampleMetrics::nll_slp);
  field(&SampleMetrics::nll_dp);
  field(&SampleMetrics::dir_acc);
  field(&SampleMetrics::iou);
  field(&SampleMetrics::f1);
  field(&SampleMetrics::nll_total);
  r.mean.nll_total = r.mean.nll_slp + r.mean.nll_dp;
  r.samples = std::move(samples);
  return r;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json per_sample = nlohmann::json::array();
  for (const auto& s : samples) per_sample.push_back(s.ToJson());
  nlohmann::json j = mean.ToJson();
  j["stddev"] = stddev.ToJson();
  j["samples"] = per_sample;
  return j;
}

}  // namespace dslp
