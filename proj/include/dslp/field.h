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

#ifndef DSLP_FIELD_H_
#define DSLP_FIELD_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dslp {

// Grid coordinates are expressed in cell units. The center of cell (i, j) sits
// at the point (i, j); the cell covers [i - 0.5, i + 0.5) x [j - 0.5, j + 0.5).
struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Polyline = std::vector<Point>;

struct Cell {
  int i = 0;
  int j = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridDims {
  int width = 0;   // I
  int height = 0;  // J
  friend bool operator==(const GridDims&, const GridDims&) = default;
  std::size_t size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool contains(int i, int j) const {
    return i >= 0 && j >= 0 && i < width && j < height;
  }
};

inline constexpr int kMinGridExtent = 8;

// Single-channel I x J scalar field. Values are stored row-major with j as the
// outer index, matching the on-disk DGF1 layout.
class GridField {
 public:
  GridField() = default;
  GridField(int width, int height, double cell_size, double fill = 0.0);
  GridField(GridDims dims, double cell_size, double fill = 0.0)
      : GridField(dims.width, dims.height, cell_size, fill) {}
  GridField(int width, int height, double cell_size,
            std::vector<double> values);

  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  GridDims dims() const { return dims_; }
  double cell_size() const { return cell_size_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * dims_.width + i;
  }
  double at(int i, int j) const { return values_[index(i, j)]; }
  double& at(int i, int j) { return values_[index(i, j)]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double Sum() const;
  // Number of cells with value >= 0.5.
  std::size_t CountSet() const;
  bool SameGeometry(const GridField& other) const {
    return dims_ == other.dims_ && cell_size_ == other.cell_size_;
  }

  friend bool operator==(const GridField&, const GridField&) = default;

 private:
  GridDims dims_;
  double cell_size_ = 1.0;
  std::vector<double> values_;
};

// Returns true when every value lies in [0, 1].
bool IsProbabilityField(const GridField& field);
bool IsBinaryField(const GridField& field);

// Debug hook for probability-valued fields. Compiled out under NDEBUG unless
// DSLP_ENABLE_CHECKS is defined; throws std::logic_error on violation.
void CheckProbabilityField(const GridField& field, const char* what);
#if !defined(NDEBUG) || defined(DSLP_ENABLE_CHECKS)
#define DSLP_CHECK_PROBABILITY(field, what) \
  ::dslp::CheckProbabilityField((field), (what))
#else
#define DSLP_CHECK_PROBABILITY(field, what) ((void)0)
#endif

struct NamedChannel {
  std::string name;
  GridField field;
};

// Layered bird's-eye-view world state. observation_mask == 1 marks cells with
// known context.
struct LayeredWorld {
  std::vector<NamedChannel> channels;
  GridField observation_mask;

  GridDims dims() const { return observation_mask.dims(); }
  double cell_size() const { return observation_mask.cell_size(); }
  const GridField& channel(const std::string& name) const;
  GridField& channel(const std::string& name);
  bool has_channel(const std::string& name) const;
  // Throws std::invalid_argument if channels disagree on geometry.
  void Validate() const;
};

struct ObservationSet {
  GridField pos_mask;
  GridField neg_mask;
  std::vector<Polyline> trajectories;

  std::size_t pos_count() const { return pos_mask.CountSet(); }
  std::size_t neg_count() const { return neg_mask.CountSet(); }
  // pos_mask + neg_mask.
  GridField Region() const;
};

// Cells whose center lies within 0.5 cell of the polyline. Consecutive
// duplicate vertices are removed first; fewer than two distinct vertices is a
// "degenerate trajectory". Cells outside `dims` are dropped. The result is
// in row-major order (j, then i) and duplicate free.
std::vector<Cell> RasterizeTrajectory(std::span<const Point> polyline,
                                      GridDims dims);

// Marks every cell within `radius` of the polyline. RasterizeTrajectory is the
// radius = 0.5 case. A single-vertex polyline is treated as a disk.
void BurnPolyline(std::span<const Point> polyline, double radius,
                  GridField& target, double value = 1.0);

// pos = union of rasterized trajectories restricted to the region; neg is the
// remainder of the region.
ObservationSet BuildObservationSet(std::vector<Polyline> trajectories,
                                   const GridField& supervised_region);

// Region mask (1 where road >= threshold) for a road probability channel.
GridField ThresholdMask(const GridField& field, double threshold);

double PointSegmentDistance(Point p, Point a, Point b);
double PointPolylineDistance(Point p, std::span<const Point> polyline);

}  // namespace dslp

#endif  // DSLP_FIELD_H_
