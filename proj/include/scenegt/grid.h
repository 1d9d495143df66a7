#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "scenegt/labeler.h"
#include "scenegt/labels.h"
#include "scenegt/lidar.h"
#include "scenegt/pose.h"

namespace scenegt {

struct VoxelCoord {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const VoxelCoord&, const VoxelCoord&) = default;
};

// Half-open box [min, max) split into shape cells per axis.
struct GridSpec {
  Eigen::Vector3d min = Eigen::Vector3d(-25.6, -25.6, -2.0);
  Eigen::Vector3d max = Eigen::Vector3d(25.6, 25.6, 1.0);
  std::array<std::uint32_t, 3> shape = {128, 128, 8};

  static GridSpec Default() { return {}; }
  // Same horizontal extents at SemanticKITTI resolution.
  static GridSpec Fine() {
    GridSpec spec;
    spec.shape = {256, 256, 32};
    return spec;
  }

  void Validate() const;
  double cell_size(int axis) const { return (max[axis] - min[axis]) / shape[axis]; }
  std::size_t voxel_count() const {
    return std::size_t{shape[0]} * shape[1] * shape[2];
  }
  // x-major flat index: ((ix * Y) + iy) * Z + iz.
  std::size_t Flat(const VoxelCoord& v) const {
    return (static_cast<std::size_t>(v.x) * shape[1] + v.y) * shape[2] + v.z;
  }
  VoxelCoord Unflat(std::size_t index) const;
  Eigen::Vector3d VoxelCenter(const VoxelCoord& v) const;
  Eigen::Vector3d VoxelMin(const VoxelCoord& v) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.min == b.min && a.max == b.max && a.shape == b.shape;
  }
};

inline std::optional<VoxelCoord> VoxelIndex(const GridSpec& spec,
                                            const Eigen::Vector3d& p) {
  int idx[3];
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = spec.min[axis];
    const double hi = spec.max[axis];
    if (!(p[axis] >= lo && p[axis] < hi)) return std::nullopt;
    const double cell = std::floor((p[axis] - lo) * spec.shape[axis] / (hi - lo));
    idx[axis] = std::min(static_cast<int>(cell), static_cast<int>(spec.shape[axis]) - 1);
  }
  return VoxelCoord{idx[0], idx[1], idx[2]};
}

// Per-voxel observation counts over the evaluation classes (Free included).
class CountGrid {
 public:
  explicit CountGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }

  // Credits one observation; returns false (and tallies it as dropped) when
  // the position falls outside the grid.
  bool Add(const Eigen::Vector3d& position, Label label);
  void Add(const Observation& obs) { Add(obs.position, Remap(obs.label)); }
  void AddAt(std::size_t voxel, Label label, std::uint32_t n = 1);
  void Merge(const CountGrid& other);

  std::uint32_t count(std::size_t voxel, Label label) const {
    return counts_[voxel * kNumClasses + ToIndex(label)];
  }
  std::span<const std::uint32_t> counts(std::size_t voxel) const {
    return {counts_.data() + voxel * kNumClasses, kNumClasses};
  }
  std::uint64_t voxel_total(std::size_t voxel) const;
  std::uint64_t in_bounds() const { return in_bounds_; }
  std::uint64_t dropped() const { return dropped_; }
  // Observations with no evaluation class (raw Unlabeled); never counted.
  std::uint64_t unlabeled() const { return unlabeled_; }

 private:
  GridSpec spec_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t in_bounds_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t unlabeled_ = 0;
};

CountGrid Accumulate(const ObservationSet& obs, const GridSpec& spec);

// Final per-voxel labels; invalid voxels carry Label::kUnlabeled.
class LabelGrid {
 public:
  explicit LabelGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  Label label(std::size_t voxel) const { return static_cast<Label>(labels_[voxel]); }
  Label label(const VoxelCoord& v) const { return label(spec_.Flat(v)); }
  bool valid(std::size_t voxel) const { return valid_[voxel] != 0; }
  bool valid(const VoxelCoord& v) const { return valid(spec_.Flat(v)); }
  void Set(std::size_t voxel, Label label);  // marks valid
  void Invalidate(std::size_t voxel);

  std::size_t valid_count() const;
  double valid_fraction() const {
    return static_cast<double>(valid_count()) / spec_.voxel_count();
  }

  const std::vector<std::uint8_t>& raw_labels() const { return labels_; }
  const std::vector<std::uint8_t>& raw_valid() const { return valid_; }
  // For decoders; sizes must equal voxel_count().
  static LabelGrid FromRaw(const GridSpec& spec, std::vector<std::uint8_t> labels,
                           std::vector<std::uint8_t> valid);

  friend bool operator==(const LabelGrid& a, const LabelGrid& b) {
    return a.spec_ == b.spec_ && a.labels_ == b.labels_ && a.valid_ == b.valid_;
  }

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint8_t> valid_;
};

// Argmax over counts, lowest class id winning ties; empty voxels are invalid.
LabelGrid MajorityVote(const CountGrid& counts);

// Binary occupancy with layout (C=Z, H=X, W=Y).
class OccupancyGrid {
 public:
  explicit OccupancyGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t Index(int c, int h, int w) const {
    return (static_cast<std::size_t>(c) * spec_.shape[0] + h) * spec_.shape[1] + w;
  }
  std::uint8_t at(int c, int h, int w) const { return cells_[Index(c, h, w)]; }
  void Mark(const VoxelCoord& v) { cells_[Index(v.z, v.x, v.y)] = 1; }
  std::size_t occupied_count() const;
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& mutable_cells() { return cells_; }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.spec_ == b.spec_ && a.cells_ == b.cells_;
  }

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> cells_;
};

// Points are taken as already expressed in the grid frame.
OccupancyGrid BuildOccupancy(std::span<const Eigen::Vector3d> points, const GridSpec& spec);
OccupancyGrid BuildOccupancy(const PointCloud& cloud, const GridSpec& spec);

struct OccupancyStack {
  GridSpec spec;
  std::vector<OccupancyGrid> grids;  // index 0 is the most recent frame
  std::vector<Pose> poses;           // same order as grids
  double t_latest = 0.0;

  // (T, Z, X, Y)
  std::array<std::size_t, 4> shape() const {
    return {grids.size(), spec.shape[2], spec.shape[0], spec.shape[1]};
  }
};

// Clouds ordered oldest to newest; every cloud is moved into the newest
// cloud's sensor frame before voxelization.
OccupancyStack BuildStack(std::span<const PointCloud> clouds, const GridSpec& spec);

// Traces every cloud in its own sensor frame, moves the observations into
// `target` (a sensor pose in the world) and counts them. Equivalent to
// RayTraceObservations + ToEgoFrame + AggregateObservations + Accumulate
// without materializing the observations.
CountGrid AccumulateClouds(std::span<const PointCloud> clouds, const Pose& target,
                           const GridSpec& spec, double r, int threads = 1);

// Sequential-frame baseline: the ego clouds of a trailing window (oldest to
// newest) labeled as if they were one instant, in the newest frame.
LabelGrid NaiveTemporalAggregate(std::span<const PointCloud> clouds,
                                 const GridSpec& spec, double r, int threads = 1);

}  // namespace scenegt
