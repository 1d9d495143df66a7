#include "scenegt/grid.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scenegt/errors.h"
#include "scenegt/parallel.h"

namespace scenegt {

void GridSpec::Validate() const {
  for (int axis = 0; axis < 3; ++axis) {
    if (!(min[axis] < max[axis])) {
      throw PreconditionError("grid extents require min < max on every axis");
    }
    if (shape[axis] < 1) throw PreconditionError("grid shape must be >= 1 per axis");
  }
}

VoxelCoord GridSpec::Unflat(std::size_t index) const {
  VoxelCoord v;
  v.z = static_cast<int>(index % shape[2]);
  index /= shape[2];
  v.y = static_cast<int>(index % shape[1]);
  v.x = static_cast<int>(index / shape[1]);
  return v;
}

Eigen::Vector3d GridSpec::VoxelMin(const VoxelCoord& v) const {
  return {min.x() + v.x * cell_size(0), min.y() + v.y * cell_size(1),
          min.z() + v.z * cell_size(2)};
}

Eigen::Vector3d GridSpec::VoxelCenter(const VoxelCoord& v) const {
  return {min.x() + (v.x + 0.5) * cell_size(0), min.y() + (v.y + 0.5) * cell_size(1),
          min.z() + (v.z + 0.5) * cell_size(2)};
}

CountGrid::CountGrid(const GridSpec& spec)
    : spec_(spec), counts_((spec.Validate(), spec.voxel_count() * kNumClasses), 0) {}

bool CountGrid::Add(const Eigen::Vector3d& position, Label label) {
  if (ToIndex(label) >= kNumClasses) {
    ++unlabeled_;
    return false;
  }
  const auto voxel = VoxelIndex(spec_, position);
  if (!voxel) {
    ++dropped_;
    return false;
  }
  ++counts_[spec_.Flat(*voxel) * kNumClasses + ToIndex(label)];
  ++in_bounds_;
  return true;
}

void CountGrid::AddAt(std::size_t voxel, Label label, std::uint32_t n) {
  if (ToIndex(label) >= kNumClasses) throw PreconditionError("cannot count Unlabeled");
  counts_.at(voxel * kNumClasses + ToIndex(label)) += n;
  in_bounds_ += n;
}

void CountGrid::Merge(const CountGrid& other) {
  if (!(other.spec_ == spec_)) throw PreconditionError("merging grids of different specs");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  in_bounds_ += other.in_bounds_;
  dropped_ += other.dropped_;
  unlabeled_ += other.unlabeled_;
}

std::uint64_t CountGrid::voxel_total(std::size_t voxel) const {
  const auto c = counts(voxel);
  return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

CountGrid Accumulate(const ObservationSet& obs, const GridSpec& spec) {
  CountGrid grid(spec);
  for (const Observation& o : obs.observations) grid.Add(o);
  return grid;
}

LabelGrid::LabelGrid(const GridSpec& spec)
    : spec_(spec),
      labels_((spec.Validate(), spec.voxel_count()), ToIndex(Label::kUnlabeled)),
      valid_(spec.voxel_count(), 0) {}

void LabelGrid::Set(std::size_t voxel, Label label) {
  labels_.at(voxel) = ToIndex(label);
  valid_[voxel] = 1;
}

void LabelGrid::Invalidate(std::size_t voxel) {
  labels_.at(voxel) = ToIndex(Label::kUnlabeled);
  valid_[voxel] = 0;
}

std::size_t LabelGrid::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 1));
}

LabelGrid LabelGrid::FromRaw(const GridSpec& spec, std::vector<std::uint8_t> labels,
                             std::vector<std::uint8_t> valid) {
  LabelGrid grid(spec);
  if (labels.size() != grid.labels_.size() || valid.size() != grid.valid_.size()) {
    throw PreconditionError("label/valid arrays do not match the grid shape");
  }
  grid.labels_ = std::move(labels);
  grid.valid_ = std::move(valid);
  return grid;
}

LabelGrid MajorityVote(const CountGrid& counts) {
  LabelGrid out(counts.spec());
  const std::size_t n = counts.spec().voxel_count();
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = counts.counts(v);
    std::size_t best = 0;
    for (std::size_t k = 1; k < kNumClasses; ++k) {
      if (c[k] > c[best]) best = k;
    }
    if (c[best] > 0) out.Set(v, static_cast<Label>(best));
  }
  return out;
}

OccupancyGrid::OccupancyGrid(const GridSpec& spec)
    : spec_(spec), cells_((spec.Validate(), spec.voxel_count()), 0) {}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

OccupancyGrid BuildOccupancy(std::span<const Eigen::Vector3d> points,
                             const GridSpec& spec) {
  OccupancyGrid grid(spec);
  for (const auto& p : points) {
    if (const auto v = VoxelIndex(spec, p)) grid.Mark(*v);
  }
  return grid;
}

OccupancyGrid BuildOccupancy(const PointCloud& cloud, const GridSpec& spec) {
  OccupancyGrid grid(spec);
  for (const auto& p : cloud.points) {
    if (const auto v = VoxelIndex(spec, p.position.cast<double>())) grid.Mark(*v);
  }
  return grid;
}

OccupancyStack BuildStack(std::span<const PointCloud> clouds, const GridSpec& spec) {
  if (clouds.empty()) throw PreconditionError("occupancy stack needs at least one cloud");
  OccupancyStack stack;
  stack.spec = spec;
  const PointCloud& newest = clouds.back();
  stack.t_latest = newest.t;
  for (auto it = clouds.rbegin(); it != clouds.rend(); ++it) {
    const Pose rel = RelativePose(it->sensor_pose, newest.sensor_pose);
    OccupancyGrid grid(spec);
    for (const auto& p : it->points) {
      if (const auto v = VoxelIndex(spec, rel * p.position.cast<double>())) grid.Mark(*v);
    }
    stack.grids.push_back(std::move(grid));
    stack.poses.push_back(it->sensor_pose);
  }
  return stack;
}

namespace {

void AccumulateCloud(const PointCloud& cloud, const Pose& target, double r,
                     CountGrid& grid) {
  const Pose rel = RelativePose(cloud.sensor_pose, target);
  ForEachObservation(cloud.points, r, [&](const Eigen::Vector3d& p, RawLabel label) {
    grid.Add(rel * p, Remap(label));
  });
}

}  // namespace

CountGrid AccumulateClouds(std::span<const PointCloud> clouds, const Pose& target,
                           const GridSpec& spec, double r, int threads) {
  if (!(r > 0.0)) throw PreconditionError("free-space step r must be positive");
  const std::size_t chunks = ChunkCount(clouds.size(), threads);
  std::vector<CountGrid> partial(chunks, CountGrid(spec));
  ParallelChunks(clouds.size(), threads, [&](std::size_t chunk, std::size_t begin,
                                              std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) AccumulateCloud(clouds[i], target, r, partial[chunk]);
  });
  CountGrid total = std::move(partial.front());
  for (std::size_t i = 1; i < partial.size(); ++i) total.Merge(partial[i]);
  return total;
}

LabelGrid NaiveTemporalAggregate(std::span<const PointCloud> clouds,
                                 const GridSpec& spec, double r, int threads) {
  if (clouds.empty()) throw PreconditionError("temporal aggregation needs at least one cloud");
  return MajorityVote(AccumulateClouds(clouds, clouds.back().sensor_pose, spec, r, threads));
}

}  // namespace scenegt
