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

#ifndef DSLP_OBJECTIVE_H_
#define DSLP_OBJECTIVE_H_

#include <cstddef>
#include <optional>

#include <json.hpp>

#include "dslp/field.h"

namespace dslp {

// Lane probabilities are clamped to [kSlpClamp, 1 - kSlpClamp] before logs.
inline constexpr double kSlpClamp = 1e-7;

// Weighting between the negative and positive terms of the SLP objective.
// An unset value means "auto": use the per-sample information-balance ratio.
struct AlphaMode {
  std::optional<double> constant;

  static AlphaMode Auto() { return {}; }
  static AlphaMode Constant(double alpha);
  bool is_auto() const { return !constant.has_value(); }
};

// |Y_pos| / (|Y_pos| + |Y_neg|). Zero positives give 0. Throws
// std::invalid_argument("no supervision") when both counts are zero.
double AlphaIB(std::size_t pos_count, std::size_t neg_count);
double AlphaIB(const ObservationSet& obs);

// -sum over positive cells of log(y_hat).
double InfoContribPos(const ObservationSet& obs, const GridField& y_hat);
// -sum over negative cells of log(1 - y_hat).
double InfoContribNeg(const ObservationSet& obs, const GridField& y_hat);
// alpha * H_neg + (1 - alpha) * H_pos.
double BalancedInfo(double h_pos, double h_neg, double alpha);

struct SlpLossReport {
  double loss = 0.0;
  double alpha_ib = 0.0;    // observed ratio, regardless of mode
  double alpha_used = 0.0;  // weight actually applied
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  bool degenerate = false;  // no positive observations
  GridField grad;           // d loss / d y_hat, zero outside the region

  nlohmann::json ToJson() const;
};

// Balanced cross-entropy averaged over the supervised region (pos + neg).
SlpLossReport SlpLoss(const ObservationSet& obs, const GridField& y_hat,
                      AlphaMode mode);

// General form with soft labels y in [0, 1] over an explicit region mask.
// alpha must be resolved by the caller.
SlpLossReport BalancedCrossEntropy(const GridField& labels,
                                   const GridField& region,
                                   const GridField& y_hat, double alpha);

// Bernoulli negative log-likelihood summed over the region. Labels may be
// soft.
double NllSlp(const GridField& y_true, const GridField& y_hat,
              const GridField& region);

}  // namespace dslp

#endif  // DSLP_OBJECTIVE_H_
