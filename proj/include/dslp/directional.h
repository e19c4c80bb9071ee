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

#ifndef DSLP_DIRECTIONAL_H_
#define DSLP_DIRECTIONAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dslp/dgf.h"
#include "dslp/field.h"

namespace dslp {

inline constexpr int kDefaultDirectionBins = 16;
inline constexpr double kDefaultVonMisesKappa = 4.0;
// Predicted distributions are clamped to [kDirClamp, 1] before any log.
inline constexpr double kDirClamp = 1e-7;
// Modes below this mass are ignored when scoring multimodal ground truth.
inline constexpr double kModeMassThreshold = 0.2;

// Center angle of bin m out of M: 2*pi*(m + 0.5) / M.
double BinCenter(int m, int bins);
// Bin containing the angle theta (any real value, wrapped to [0, 2*pi)).
int BinOf(double theta, int bins);
double WrapAngle(double theta);  // to [0, 2*pi)
double AngularDistance(double a, double b);  // in [0, pi]

struct VonMisesSpec {
  VonMisesSpec(double mu, double kappa);
  double mu;     // [0, 2*pi)
  double kappa;  // >= 0
};

// Per-cell categorical direction distributions. Cells without directional
// supervision are flagged undefined and hold zeros.
class DirField {
 public:
  DirField() = default;
  DirField(GridDims dims, int bins, double cell_size = 1.0);

  int bins() const { return bins_; }
  GridDims dims() const { return dims_; }
  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  double cell_size() const { return cell_size_; }
  std::size_t cell_count() const { return dims_.size(); }

  std::size_t cell_index(int i, int j) const {
    return static_cast<std::size_t>(j) * dims_.width + i;
  }
  bool defined(std::size_t cell) const { return defined_[cell] != 0; }
  bool defined(int i, int j) const { return defined(cell_index(i, j)); }
  std::span<const double> dist(std::size_t cell) const {
    return {bins_data_.data() + cell * bins_, static_cast<std::size_t>(bins_)};
  }
  std::span<const double> dist(int i, int j) const { return dist(cell_index(i, j)); }
  std::span<double> mutable_dist(std::size_t cell) {
    return {bins_data_.data() + cell * bins_, static_cast<std::size_t>(bins_)};
  }
  // Copies `d` (length M) into the cell and marks it defined.
  void Set(std::size_t cell, std::span<const double> d);
  void Set(int i, int j, std::span<const double> d) { Set(cell_index(i, j), d); }
  void MarkDefined(std::size_t cell) { defined_[cell] = 1; }
  void Undefine(std::size_t cell);
  std::size_t DefinedCount() const;
  GridField DefinedMask() const;
  // Largest |sum - 1| over defined cells.
  double MaxNormalizationError() const;

  friend bool operator==(const DirField&, const DirField&) = default;

 private:
  GridDims dims_;
  int bins_ = 0;
  double cell_size_ = 1.0;
  std::vector<double> bins_data_;
  std::vector<std::uint8_t> defined_;
};

// Discrete von Mises over M bins evaluated at bin centers, normalized to 1.
std::vector<double> EncodeVonMises(const VonMisesSpec& spec, int bins);

// Equal-weight superposition, renormalized. nullopt for an empty input
// (the caller marks the cell undefined).
std::optional<std::vector<double>> Superimpose(
    std::span<const std::vector<double>> dists);

// Encodes trajectory tangents into a per-cell directional target: every cell a
// trajectory passes within 0.5 cell of receives the von Mises encoding of the
// local tangent; multiple passes are superimposed with equal weight.
DirField EncodeTrajectories(std::span<const Polyline> trajectories,
                            GridDims dims, double cell_size, int bins,
                            double kappa);

struct DpLossReport {
  double loss = 0.0;
  std::size_t defined_cells = 0;
  // d loss / d w_hat, layout matches DirField (cell-major, M per cell).
  std::vector<double> grad;
};

// Mean KL(w || w_hat) over cells defined in W. W_hat is clamped to
// [kDirClamp, 1]; entries where the clamp is active get zero gradient.
DpLossReport DpLoss(const DirField& target, const DirField& predicted);

// Categorical cross-entropy summed over mask cells where W is defined.
double NllDp(const DirField& target, const DirField& predicted,
             const GridField& cells);

struct DirectionMode {
  int bin = 0;
  double mass = 0.0;  // mass of bins within +-pi/4 of the mode center
};

// Circular local maxima, strongest first.
std::vector<DirectionMode> FindModes(std::span<const double> dist);
int ArgmaxBin(std::span<const double> dist);
// 1 - |mean resultant vector|.
double CircularVariance(std::span<const double> dist);
// Mean resultant angle of the distribution.
double MeanDirection(std::span<const double> dist);

// Fraction of mask cells whose predicted argmax bin center lies within pi/4
// of the ground-truth argmax, or of any ground-truth mode with mass above
// kModeMassThreshold.
double DirectionalAccuracy(const DirField& truth, const DirField& predicted,
                           const GridField& cells);

// DGF1 mapping: "dir_0".."dir_{M-1}" plus "dir_defined".
void AddDirField(DgfFile& file, const DirField& field,
                 const std::string& prefix = "");
DirField GetDirField(const DgfFile& file, const std::string& prefix = "");
bool HasDirField(const DgfFile& file, const std::string& prefix = "");

}  // namespace dslp

#endif  // DSLP_DIRECTIONAL_H_
