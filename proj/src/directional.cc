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

#include "dslp/directional.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dslp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double WrapAngle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double AngularDistance(double a, double b) {
  const double d = std::fabs(WrapAngle(a) - WrapAngle(b));
  return std::min(d, kTwoPi - d);
}

double BinCenter(int m, int bins) { return kTwoPi * (m + 0.5) / bins; }

int BinOf(double theta, int bins) {
  const int m = static_cast<int>(std::floor(WrapAngle(theta) / kTwoPi * bins));
  return std::clamp(m, 0, bins - 1);
}

VonMisesSpec::VonMisesSpec(double mu_in, double kappa_in)
    : mu(WrapAngle(mu_in)), kappa(kappa_in) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
}

DirField::DirField(GridDims dims, int bins, double cell_size)
    : dims_(dims),
      bins_(bins),
      cell_size_(cell_size),
      bins_data_(dims.size() * static_cast<std::size_t>(bins), 0.0),
      defined_(dims.size(), 0) {
  if (bins < 1) throw std::invalid_argument("bin count must be positive");
}

void DirField::Set(std::size_t cell, std::span<const double> d) {
  if (d.size() != static_cast<std::size_t>(bins_)) {
    throw std::invalid_argument("distribution length does not match bin count");
  }
  std::copy(d.begin(), d.end(), bins_data_.begin() + cell * bins_);
  defined_[cell] = 1;
}

void DirField::Undefine(std::size_t cell) {
  std::fill_n(bins_data_.begin() + cell * bins_, bins_, 0.0);
  defined_[cell] = 0;
}

std::size_t DirField::DefinedCount() const {
  return static_cast<std::size_t>(std::count(defined_.begin(), defined_.end(), 1));
}

GridField DirField::DefinedMask() const {
  GridField mask(dims_, cell_size_, 0.0);
  for (std::size_t c = 0; c < cell_count(); ++c) mask[c] = defined_[c] ? 1.0 : 0.0;
  return mask;
}

double DirField::MaxNormalizationError() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < cell_count(); ++c) {
    if (!defined(c)) continue;
    double s = 0.0;
    for (double v : dist(c)) s += v;
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  return worst;
}

std::vector<double> EncodeVonMises(const VonMisesSpec& spec, int bins) {
  if (bins < 4) throw std::invalid_argument("insufficient angular resolution");
  std::vector<double> out(bins);
  double total = 0.0;
  for (int m = 0; m < bins; ++m) {
    // exp(kappa * (cos - 1)) keeps the largest term at 1.
    out[m] = std::exp(spec.kappa * (std::cos(BinCenter(m, bins) - spec.mu) - 1.0));
    total += out[m];
  }
  for (double& v : out) v /= total;
  return out;
}

std::optional<std::vector<double>> Superimpose(
    std::span<const std::vector<double>> dists) {
  if (dists.empty()) return std::nullopt;
  const std::size_t bins = dists.front().size();
  std::vector<double> sum(bins, 0.0);
  for (const auto& d : dists) {
    if (d.size() != bins) throw std::invalid_argument("distribution lengths differ");
    for (std::size_t m = 0; m < bins; ++m) sum[m] += d[m];
  }
  double total = 0.0;
  for (double v : sum) total += v;
  if (!(total > 0.0)) return std::nullopt;
  for (double& v : sum) v /= total;
  return sum;
}

DirField EncodeTrajectories(std::span<const Polyline> trajectories,
                            GridDims dims, double cell_size, int bins,
                            double kappa) {
  DirField field(dims, bins, cell_size);
  std::vector<double> accum(dims.size() * bins, 0.0);
  std::vector<int> passes(dims.size(), 0);
  // Per trajectory, the nearest segment tangent for every covered cell.
  std::vector<double> best_dist(dims.size());
  std::vector<double> best_angle(dims.size());
  std::vector<std::size_t> touched;
  for (const Polyline& traj : trajectories) {
    std::fill(best_dist.begin(), best_dist.end(),
              std::numeric_limits<double>::infinity());
    touched.clear();
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
      const Point a = traj[k];
      const Point b = traj[k + 1];
      if (a.x == b.x && a.y == b.y) continue;
      const double angle = std::atan2(b.y - a.y, b.x - a.x);
      const int i0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - 0.5)));
      const int i1 = std::min(dims.width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + 0.5)));
      const int j0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - 0.5)));
      const int j1 = std::min(dims.height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + 0.5)));
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          const double d = PointSegmentDistance({double(i), double(j)}, a, b);
          if (d > 0.5 + 1e-12) continue;
          const std::size_t c = static_cast<std::size_t>(j) * dims.width + i;
          if (std::isinf(best_dist[c])) touched.push_back(c);
          if (d < best_dist[c]) {
            best_dist[c] = d;
            best_angle[c] = angle;
          }
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t c : touched) {
      const auto enc = EncodeVonMises(VonMisesSpec(best_angle[c], kappa), bins);
      for (int m = 0; m < bins; ++m) accum[c * bins + m] += enc[m];
      ++passes[c];
    }
  }
  std::vector<double> d(bins);
  for (std::size_t c = 0; c < dims.size(); ++c) {
    if (passes[c] == 0) continue;
    double total = 0.0;
    for (int m = 0; m < bins; ++m) total += accum[c * bins + m];
    for (int m = 0; m < bins; ++m) d[m] = accum[c * bins + m] / total;
    field.Set(c, d);
  }
  return field;
}

namespace {

void CheckCompatible(const DirField& a, const DirField& b) {
  if (a.bins() != b.bins() || !(a.dims() == b.dims())) {
    throw std::invalid_argument("directional fields differ in shape");
  }
}

}  // namespace

DpLossReport DpLoss(const DirField& target, const DirField& predicted) {
  CheckCompatible(target, predicted);
  const int bins = target.bins();
  DpLossReport report;
  report.grad.assign(target.cell_count() * bins, 0.0);
  report.defined_cells = target.DefinedCount();
  if (report.defined_cells == 0) {
    throw std::invalid_argument("no directional supervision");
  }
  const double inv = 1.0 / static_cast<double>(report.defined_cells);
  double total = 0.0;
  for (std::size_t c = 0; c < target.cell_count(); ++c) {
    if (!target.defined(c)) continue;
    const auto w = target.dist(c);
    const auto w_hat = predicted.dist(c);
    for (int m = 0; m < bins; ++m) {
      const double raw = w_hat[m];
      const double q = std::clamp(raw, kDirClamp, 1.0);
      if (w[m] > 0.0) total += w[m] * (std::log(w[m]) - std::log(q));
      if (raw > kDirClamp && raw < 1.0) report.grad[c * bins + m] = -w[m] / q * inv;
    }
  }
  report.loss = total * inv;
  return report;
}

double NllDp(const DirField& target, const DirField& predicted,
             const GridField& cells) {
  CheckCompatible(target, predicted);
  if (!(cells.dims() == target.dims())) throw std::invalid_argument("mask shape mismatch");
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < target.cell_count(); ++c) {
    if (cells[c] < 0.5 || !target.defined(c)) continue;
    const auto w = target.dist(c);
    const auto w_hat = predicted.dist(c);
    for (int m = 0; m < target.bins(); ++m) {
      if (w[m] > 0.0) total -= w[m] * std::log(std::clamp(w_hat[m], kDirClamp, 1.0));
    }
    ++used;
  }
  if (used == 0) throw std::invalid_argument("empty evaluation mask");
  return total;
}

int ArgmaxBin(std::span<const double> dist) {
  return static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
}

std::vector<DirectionMode> FindModes(std::span<const double> dist) {
  const int bins = static_cast<int>(dist.size());
  std::vector<DirectionMode> modes;
  for (int m = 0; m < bins; ++m) {
    const double prev = dist[(m + bins - 1) % bins];
    const double next = dist[(m + 1) % bins];
    if (!(dist[m] > prev && dist[m] >= next)) continue;
    DirectionMode mode{m, 0.0};
    for (int k = 0; k < bins; ++k) {
      if (AngularDistance(BinCenter(k, bins), BinCenter(m, bins)) <=
          std::numbers::pi / 4 + 1e-9) {
        mode.mass += dist[k];
      }
    }
    modes.push_back(mode);
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const DirectionMode& a, const DirectionMode& b) {
                     return a.mass > b.mass;
                   });
  return modes;
}

namespace {

std::pair<double, double> Resultant(std::span<const double> dist) {
  const int bins = static_cast<int>(dist.size());
  double cx = 0.0, cy = 0.0, total = 0.0;
  for (int m = 0; m < bins; ++m) {
    cx += dist[m] * std::cos(BinCenter(m, bins));
    cy += dist[m] * std::sin(BinCenter(m, bins));
    total += dist[m];
  }
  if (total > 0.0) {
    cx /= total;
    cy /= total;
  }
  return {cx, cy};
}

}  // namespace

double CircularVariance(std::span<const double> dist) {
  const auto [cx, cy] = Resultant(dist);
  return 1.0 - std::hypot(cx, cy);
}

double MeanDirection(std::span<const double> dist) {
  const auto [cx, cy] = Resultant(dist);
  return WrapAngle(std::atan2(cy, cx));
}

double DirectionalAccuracy(const DirField& truth, const DirField& predicted,
                           const GridField& cells) {
  CheckCompatible(truth, predicted);
  const int bins = truth.bins();
  std::size_t used = 0;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < truth.cell_count(); ++c) {
    if (cells[c] < 0.5 || !truth.defined(c)) continue;
    ++used;
    const double pred_angle = BinCenter(ArgmaxBin(predicted.dist(c)), bins);
    const auto t = truth.dist(c);
    bool ok = AngularDistance(pred_angle, BinCenter(ArgmaxBin(t), bins)) <=
              std::numbers::pi / 4 + 1e-9;
    if (!ok) {
      for (const DirectionMode& mode : FindModes(t)) {
        if (mode.mass > kModeMassThreshold &&
            AngularDistance(pred_angle, BinCenter(mode.bin, bins)) <=
                std::numbers::pi / 4 + 1e-9) {
          ok = true;
          break;
        }
      }
    }
    if (ok) ++correct;
  }
  if (used == 0) throw std::invalid_argument("empty evaluation mask");
  return static_cast<double>(correct) / static_cast<double>(used);
}

void AddDirField(DgfFile& file, const DirField& field, const std::string& prefix) {
  const GridDims dims = field.dims();
  for (int m = 0; m < field.bins(); ++m) {
    GridField channel(dims, field.cell_size(), 0.0);
    for (std::size_t c = 0; c < field.cell_count(); ++c) channel[c] = field.dist(c)[m];
    file.Add(prefix + "dir_" + std::to_string(m), channel);
  }
  file.Add(prefix + "dir_defined", field.DefinedMask());
}

bool HasDirField(const DgfFile& file, const std::string& prefix) {
  return file.Has(prefix + "dir_defined") && file.Has(prefix + "dir_0");
}

DirField GetDirField(const DgfFile& file, const std::string& prefix) {
  int bins = 0;
  while (file.Has(prefix + "dir_" + std::to_string(bins))) ++bins;
  if (bins == 0 || !file.Has(prefix + "dir_defined")) {
    throw std::out_of_range("DGF1: no directional field with prefix '" + prefix + "'");
  }
  const GridField defined = file.Get(prefix + "dir_defined");
  DirField field(defined.dims(), bins, defined.cell_size());
  std::vector<GridField> channels;
  for (int m = 0; m < bins; ++m) channels.push_back(file.Get(prefix + "dir_" + std::to_string(m)));
  std::vector<double> d(bins);
  for (std::size_t c = 0; c < field.cell_count(); ++c) {
    if (defined[c] < 0.5) continue;
    for (int m = 0; m < bins; ++m) d[m] = channels[m][c];
    field.Set(c, d);
  }
  return field;
}

}  // namespace dslp
