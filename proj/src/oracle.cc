#include "scenegt/oracle.h"

#include <algorithm>
#include <cmath>

namespace scenegt {
namespace {

// Touch priority: higher wins.
constexpr int kGroundPriority = 1;
constexpr int kStaticPriority = 2;
constexpr int kDynamicPriority = 3;

struct Touch {
  int priority = 0;
  Label label = Label::kFree;
};

struct IndexRange {
  int lo[3];
  int hi[3];
  bool empty = false;
};

IndexRange RangeFor(const GridSpec& spec, const Eigen::Vector3d& a,
                    const Eigen::Vector3d& b) {
  IndexRange range;
  for (int axis = 0; axis < 3; ++axis) {
    const double cell = spec.cell_size(axis);
    const int n = static_cast<int>(spec.shape[axis]);
    const int lo = static_cast<int>(std::floor((a[axis] - spec.min[axis]) / cell));
    const int hi = static_cast<int>(std::floor((b[axis] - spec.min[axis]) / cell));
    if (hi < 0 || lo >= n) range.empty = true;
    range.lo[axis] = std::clamp(lo, 0, n - 1);
    range.hi[axis] = std::clamp(hi, 0, n - 1);
  }
  return range;
}

template <typename Fn>
void ForEachIn(const GridSpec& spec, const IndexRange& range, Fn&& fn) {
  if (range.empty) return;
  for (int x = range.lo[0]; x <= range.hi[0]; ++x)
    for (int y = range.lo[1]; y <= range.hi[1]; ++y)
      for (int z = range.lo[2]; z <= range.hi[2]; ++z) fn(spec.Flat({x, y, z}));
}

// Per-voxel strongest touching primitive with every voxel grown by `grow`.
std::vector<Touch> TouchMap(const Snapshot& snap, const Pose& grid_pose,
                            const GridSpec& spec, const Eigen::Vector3d& grow) {
  std::vector<Touch> touch(spec.voxel_count());
  const Eigen::Matrix3d rg_t = grid_pose.rotation().transpose();
  for (const auto& box : snap.boxes()) {
    const Eigen::Vector3d center = rg_t * (box.center - grid_pose.translation());
    const Eigen::Vector3d extent = (rg_t * box.rotation).cwiseAbs() * box.half_extents;
    const Label label = Remap(box.label);
    const int priority = IsDynamic(label) ? kDynamicPriority : kStaticPriority;
    ForEachIn(spec, RangeFor(spec, center - extent - grow, center + extent + grow),
              [&](std::size_t v) {
                if (priority > touch[v].priority) touch[v] = {priority, label};
              });
  }
  if (const auto& ground = snap.ground()) {
    const Eigen::Vector3d half(spec.cell_size(0) / 2, spec.cell_size(1) / 2,
                               spec.cell_size(2) / 2);
    const Eigen::Vector3d z_row = grid_pose.rotation().row(2).transpose().cwiseAbs();
    for (std::size_t v = 0; v < touch.size(); ++v) {
      if (touch[v].priority >= kGroundPriority) continue;
      const Eigen::Vector3d c = grid_pose * spec.VoxelCenter(spec.Unflat(v));
      const double z_lo = c.z() - z_row.dot(half + grow);
      if (z_lo < ground->height) {
        touch[v] = {kGroundPriority, Remap(ground->LabelAt(c.x(), c.y()))};
      }
    }
  }
  return touch;
}

}  // namespace

LabelGrid OracleGrid(const World& world, double t, const Pose& grid_pose,
                     const GridSpec& spec, double touch_margin) {
  spec.Validate();
  const Snapshot snap(world, t);
  const auto touch = TouchMap(snap, grid_pose, spec, Eigen::Vector3d::Constant(touch_margin));
  LabelGrid out(spec);
  for (std::size_t v = 0; v < touch.size(); ++v) {
    if (touch[v].priority == 0) {
      out.Set(v, Label::kFree);
      continue;
    }
    const Label center = Remap(snap.LabelAt(grid_pose * spec.VoxelCenter(spec.Unflat(v))));
    out.Set(v, center != Label::kFree ? center : touch[v].label);
  }
  return out;
}

std::vector<VoxelRegion> ClassifyVoxelRegions(const World& world, double t,
                                              const Pose& grid_pose,
                                              const GridSpec& spec) {
  spec.Validate();
  const Snapshot snap(world, t);
  const Eigen::Vector3d cell(spec.cell_size(0), spec.cell_size(1), spec.cell_size(2));
  const auto touch = TouchMap(snap, grid_pose, spec, cell);
  std::vector<VoxelRegion> regions(spec.voxel_count(), VoxelRegion::kBoundary);
  for (std::size_t v = 0; v < regions.size(); ++v) {
    if (touch[v].priority == 0) regions[v] = VoxelRegion::kFreeInterior;
  }

  // Corners of the voxel grown by one cell, in the world frame.
  const auto corners = [&](std::size_t v) {
    std::array<Eigen::Vector3d, 8> out;
    const Eigen::Vector3d lo = spec.VoxelMin(spec.Unflat(v)) - cell;
    for (int k = 0; k < 8; ++k) {
      const Eigen::Vector3d offset((k & 1) ? 3 * cell.x() : 0.0, (k & 2) ? 3 * cell.y() : 0.0,
                                   (k & 4) ? 3 * cell.z() : 0.0);
      out[k] = grid_pose * (lo + offset);
    }
    return out;
  };
  const Eigen::Matrix3d rg_t = grid_pose.rotation().transpose();
  for (const auto& box : snap.boxes()) {
    const Eigen::Vector3d center = rg_t * (box.center - grid_pose.translation());
    const Eigen::Vector3d extent = (rg_t * box.rotation).cwiseAbs() * box.half_extents;
    ForEachIn(spec, RangeFor(spec, center - extent, center + extent), [&](std::size_t v) {
      for (const auto& p : corners(v)) {
        const Eigen::Vector3d local = box.rotation.transpose() * (p - box.center);
        if ((local.cwiseAbs().array() > box.half_extents.array()).any()) return;
      }
      regions[v] = VoxelRegion::kSolidInterior;
    });
  }
  if (const auto& ground = snap.ground()) {
    for (std::size_t v = 0; v < regions.size(); ++v) {
      if (regions[v] != VoxelRegion::kBoundary) continue;
      const auto c = corners(v);
      if (std::all_of(c.begin(), c.end(),
                      [&](const Eigen::Vector3d& p) { return p.z() < ground->height; })) {
        regions[v] = VoxelRegion::kSolidInterior;
      }
    }
  }
  return regions;
}

}  // namespace scenegt
