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

#ifndef DSLP_TRAINER_H_
#define DSLP_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslp/directional.h"
#include "dslp/field.h"
#include "dslp/objective.h"

namespace dslp {

struct ConvLayerSpec {
  int kernel = 5;  // odd
  int hidden = 32;
  friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

// Shared-weight convolutional trunk (tanh) followed by two per-cell heads: a
// sigmoid lane-probability unit and an M-way softmax over direction bins.
struct ArchSpec {
  int in_channels = 3;
  std::vector<ConvLayerSpec> layers = {{5, 32}, {5, 32}};
  int bins = kDefaultDirectionBins;

  std::size_t ParameterCount() const;
  void Validate() const;
  nlohmann::json ToJson() const;
  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

class Predictor {
 public:
  Predictor() = default;
  explicit Predictor(ArchSpec arch);  // all-zero parameters
  Predictor(ArchSpec arch, std::vector<double> params);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  static Predictor Random(ArchSpec arch, std::uint64_t seed);

  const ArchSpec& arch() const { return arch_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& mutable_params() { return params_; }

 private:
  ArchSpec arch_;
  std::vector<double> params_;
};

struct PredictorOutput {
  GridField y_hat;
  DirField w_hat;
};

// Throws std::invalid_argument("channel mismatch") when the world's channel
// count differs from the architecture.
PredictorOutput Forward(const Predictor& pred, const LayeredWorld& world);

struct LossWeights {
  AlphaMode alpha = AlphaMode::Auto();
  double lambda = 1.0;  // weight of the directional term
};

struct LossAndGradient {
  double loss = 0.0;
  double slp_loss = 0.0;
  double dp_loss = 0.0;  // 0 when the sample has no directional supervision
  double alpha_used = 0.0;
  std::vector<double> grad;  // d loss / d params
};

// Exact gradient of SLP + lambda * DP for one sample.
LossAndGradient Backward(const Predictor& pred, const LayeredWorld& world,
                         const ObservationSet& obs, const DirField& w_target,
                         const LossWeights& weights);

// Loss only; used by finite-difference checks.
double EvaluateLoss(const Predictor& pred, const LayeredWorld& world,
                    const ObservationSet& obs, const DirField& w_target,
                    const LossWeights& weights);

struct TrainingSample {
  LayeredWorld input;
  ObservationSet obs;
  DirField dir_target;
};

// Held-out sample with ground truth for the NLL trace.
struct EvalSample {
  LayeredWorld input;
  GridField lane_raster;  // y_true
  GridField road_region;  // SLP evaluation region
  DirField dir_true;
};

enum class AlphaStrategy { kAuto, kConstant, kDatasetMean };

struct TrainConfig {
  double learning_rate = 0.05;
  int steps = 300;
  int batch_size = 4;
  double lambda = 1.0;
  double momentum = 0.9;
  bool cosine_decay = true;  // learning rate follows a half cosine to 0
  AlphaStrategy alpha_strategy = AlphaStrategy::kAuto;
  double alpha_constant = 0.1;
  std::uint64_t seed = 0;
  int eval_every = 0;  // 0: only at the end
  int jobs = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
};

// "auto", "mean" or a number in [0, 1].
void ParseAlpha(const std::string& text, TrainConfig& config);
std::string AlphaLabel(const TrainConfig& config);

struct TracePoint {
  int step = 0;
  double train_loss = 0.0;  // mean batch loss at this step
  double heldout_nll_slp = 0.0;  // per-sample mean
  double heldout_nll_dp = 0.0;
  nlohmann::json ToJson() const;
};

struct TrainResult {
  Predictor predictor;
  std::vector<TracePoint> trace;
  double alpha_dataset_mean = 0.0;
};

// Held-out NLLs (per-sample mean of summed NLL_SLP and NLL_DP).
std::pair<double, double> HeldoutNll(const Predictor& pred,
                                     const std::vector<EvalSample>& heldout);

// Momentum gradient descent with a seeded batch schedule. Throws
// std::runtime_error if the loss becomes non-finite.
TrainResult Train(const std::vector<TrainingSample>& dataset,
                  const std::vector<EvalSample>& heldout,
                  const ArchSpec& arch, const TrainConfig& config);

// Model file: "DSLP" | u32 in_channels | u32 bins | u32 layer_count |
// layer_count x (u32 kernel, u32 hidden) | u32 param_count | f32 params.
std::vector<std::uint8_t> EncodeModel(const Predictor& pred);
Predictor DecodeModel(const std::vector<std::uint8_t>& bytes);

}  // namespace dslp

#endif  // DSLP_TRAINER_H_
