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

#ifndef DSLP_PIPELINE_H_
#define DSLP_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslp/augment.h"
#include "dslp/dgf.h"
#include "dslp/evalmetrics.h"
#include "dslp/graphgen.h"
#include "dslp/synthworld.h"
#include "dslp/trainer.h"

namespace dslp {

inline constexpr const char* kToolVersion = "1.0.0";

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t Fnv1a64(const std::string& text);
std::string Hex64(std::uint64_t value);

// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version = kToolVersion;
  std::string wall_clock;  // not part of the hash

  nlohmann::json ToJson() const;
  // FNV-1a over the canonical JSON without the wall clock.
  std::string Hash() const;
};

std::string CurrentWallClock();

// ---- Sample files: DGF1 channels plus a JSON sidecar (same stem, .json).

struct StoredSample {
  LayeredWorld world;
  std::optional<ObservationSet> obs;
  std::optional<GroundTruth> truth;  // routes are not stored
  nlohmann::json meta = nlohmann::json::object();
};

DgfFile SampleToDgf(const StoredSample& sample);
nlohmann::json SampleSidecar(const StoredSample& sample, const std::string& manifest_hash);
StoredSample SampleFromFiles(const DgfFile& file, const nlohmann::json& sidecar);

std::string SidecarPath(const std::string& dgf_path);
void SaveSample(const std::string& path, const StoredSample& sample,
                const std::string& manifest_hash);
StoredSample LoadSample(const std::string& path);

// World model stage; passthrough needs no ground truth.
LayeredWorld CompleteStored(const StoredSample& sample, CompletionMode mode,
                            double noise_sigma, std::uint64_t seed);

// ---- Predictions: channel "slp" plus the directional channels.

DgfFile PredictionToDgf(const PredictorOutput& out);
PredictorOutput PredictionFromDgf(const DgfFile& file);

// ---- Rendering (binary PPM, P6). SLP is brightness, the DP argmax is hue
// and graph edges are drawn white. North (high j) is at the top.

std::vector<std::uint8_t> RenderPpm(GridDims dims, const GridField* y_hat,
                                    const DirField* w_hat, const LaneGraph* graph,
                                    const std::string& comment = "");

// ---- Synthetic suites.

struct SuiteConfig {
  int grid_size = 48;
  std::vector<TemplateKind> templates = AllTemplates();
  int train_worlds = 30;
  int heldout_worlds = 10;
  ObservationConfig observation;
  CompletionMode completion = CompletionMode::kOracle;
  double completion_noise = 0.05;
  bool augment = true;
  int augment_copies = 1;  // warped copies per training world
  std::uint64_t seed = 0;

  static SuiteConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

struct HeldoutWorld {
  GeneratedWorld world;
  SampledObservations observations;
  LayeredWorld input;  // after world completion
};

struct Suite {
  std::vector<GeneratedWorld> train_worlds;
  std::vector<SampledObservations> train_observations;
  std::vector<TrainingSample> train;  // originals, then augmented copies
  std::vector<HeldoutWorld> heldout;
  std::vector<EvalSample> heldout_eval;
};

Suite BuildSuite(const SuiteConfig& config, int jobs = 1);

// Mean |y_hat - p_true| over lane cells of unobserved routes that are not also
// lane cells of an observed route. Returns nullopt if no such cells exist.
std::optional<double> UnobservedLaneError(const GridField& y_hat,
                                          const GroundTruth& truth,
                                          const std::vector<int>& observed_routes);

// ---- Pipeline.

struct PipelineConfig {
  std::uint64_t seed = 7;
  SuiteConfig suite;
  ArchSpec arch;
  TrainConfig train;
  GraphConfig graph;
  bool graph_uturn_from_lane_width = true;
  bool render = true;
  int jobs = 1;
  // Optional ablation grid; empty lists skip the axis (kept at the base value).
  std::vector<std::string> ablation_alpha;
  std::vector<CompletionMode> ablation_completion;
  std::vector<bool> ablation_augment;

  static PipelineConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
  bool has_ablation() const {
    return !ablation_alpha.empty() || !ablation_completion.empty() || !ablation_augment.empty();
  }
};

struct AblationRow {
  std::string alpha;
  CompletionMode completion = CompletionMode::kOracle;
  bool augment = true;
  EvalReport report;
};

struct PipelineOutcome {
  EvalReport report;
  TrainResult training;
  std::vector<LaneGraph> graphs;
  std::vector<AblationRow> ablation;
  std::string manifest_hash;
};

// Train on a suite, predict and fit graphs on the held-out worlds, evaluate.
PipelineOutcome RunExperiment(const PipelineConfig& config, const Suite& suite);

nlohmann::json AblationToJson(const std::vector<AblationRow>& rows);
std::string AblationTable(const std::vector<AblationRow>& rows);

// Runs every stage and writes artifacts into `out_dir`. Work happens in a
// staging directory that is renamed on success and removed on failure.
PipelineOutcome RunPipeline(const PipelineConfig& config, const std::string& out_dir);

}  // namespace dslp

#endif  // DSLP_PIPELINE_H_
