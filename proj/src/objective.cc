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

#include "dslp/objective.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dslp {
namespace {

double ClampProb(double p) { return std::clamp(p, kSlpClamp, 1.0 - kSlpClamp); }

void RequireSameDims(const GridField& a, const GridField& b) {
  if (!(a.dims() == b.dims())) throw std::invalid_argument("field dimensions differ");
}

}  // namespace

AlphaMode AlphaMode::Constant(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  return AlphaMode{alpha};
}

double AlphaIB(std::size_t pos_count, std::size_t neg_count) {
  if (pos_count + neg_count == 0) throw std::invalid_argument("no supervision");
  return static_cast<double>(pos_count) /
         static_cast<double>(pos_count + neg_count);
}

double AlphaIB(const ObservationSet& obs) {
  return AlphaIB(obs.pos_count(), obs.neg_count());
}

double InfoContribPos(const ObservationSet& obs, const GridField& y_hat) {
  RequireSameDims(obs.pos_mask, y_hat);
  double h = 0.0;
  for (std::size_t k = 0; k < y_hat.size(); ++k) {
    if (obs.pos_mask[k] > 0.0) h -= obs.pos_mask[k] * std::log(ClampProb(y_hat[k]));
  }
  return h;
}

double InfoContribNeg(const ObservationSet& obs, const GridField& y_hat) {
  RequireSameDims(obs.neg_mask, y_hat);
  double h = 0.0;
  for (std::size_t k = 0; k < y_hat.size(); ++k) {
    if (obs.neg_mask[k] > 0.0) h -= obs.neg_mask[k] * std::log(1.0 - ClampProb(y_hat[k]));
  }
  return h;
}

double BalancedInfo(double h_pos, double h_neg, double alpha) {
  return alpha * h_neg + (1.0 - alpha) * h_pos;
}

nlohmann::json SlpLossReport::ToJson() const {
  return {{"loss", loss},
          {"alpha_ib", alpha_ib},
          {"pos_count", pos_count},
          {"neg_count", neg_count}};
}

SlpLossReport BalancedCrossEntropy(const GridField& labels,
                                   const GridField& region,
                                   const GridField& y_hat, double alpha) {
  RequireSameDims(labels, y_hat);
  RequireSameDims(region, y_hat);
  SlpLossReport report;
  report.alpha_used = alpha;
  report.grad = GridField(y_hat.dims(), y_hat.cell_size(), 0.0);
  std::size_t region_size = 0;
  for (std::size_t k = 0; k < region.size(); ++k) {
    if (region[k] >= 0.5) ++region_size;
  }
  if (region_size == 0) throw std::invalid_argument("no supervision");
  const double inv = 1.0 / static_cast<double>(region_size);
  double total = 0.0;
  for (std::size_t k = 0; k < y_hat.size(); ++k) {
    if (region[k] < 0.5) continue;
    const double y = labels[k];
    const double raw = y_hat[k];
    const double p = ClampProb(raw);
    total += alpha * (1.0 - y) * std::log(1.0 - p) + (1.0 - alpha) * y * std::log(p);
    if (raw > kSlpClamp && raw < 1.0 - kSlpClamp) {
      report.grad[k] = -inv * ((1.0 - alpha) * y / p - alpha * (1.0 - y) / (1.0 - p));
    }
  }
  report.loss = -total * inv;
  return report;
}

SlpLossReport SlpLoss(const ObservationSet& obs, const GridField& y_hat,
                      AlphaMode mode) {
  const std::size_t pos = obs.pos_count();
  const std::size_t neg = obs.neg_count();
  const double alpha_ib = AlphaIB(pos, neg);
  const double alpha = mode.is_auto() ? alpha_ib : *mode.constant;
  SlpLossReport report =
      BalancedCrossEntropy(obs.pos_mask, obs.Region(), y_hat, alpha);
  report.alpha_ib = alpha_ib;
  report.pos_count = pos;
  report.neg_count = neg;
  report.degenerate = pos == 0;
  return report;
}

double NllSlp(const GridField& y_true, const GridField& y_hat,
              const GridField& region) {
  RequireSameDims(y_true, y_hat);
  RequireSameDims(region, y_hat);
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < y_hat.size(); ++k) {
    if (region[k] < 0.5) continue;
    const double p = ClampProb(y_hat[k]);
    const double y = y_true[k];
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("empty evaluation region");
  return total;
}

}  // namespace dslp
