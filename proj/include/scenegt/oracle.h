#pragma once

#include <cstdint>
#include <vector>

#include "scenegt/grid.h"
#include "scenegt/world.h"

namespace scenegt {

// Geometry-derived labels for a grid placed at `grid_pose` (grid frame ->
// world) at time t, independent of any sensor simulation.
//
// A voxel is Free when no primitive touches it (its box grown by
// `touch_margin` meters on every side). Otherwise it takes the label at its
// center, or the label of a touching primitive when the center is in open
// air, dynamic actors first. Every voxel is valid.
LabelGrid OracleGrid(const World& world, double t, const Pose& grid_pose,
                     const GridSpec& spec, double touch_margin = 1e-3);

enum class VoxelRegion : std::uint8_t {
  kBoundary = 0,
  kFreeInterior = 1,   // the voxel and its 26 neighbors touch nothing
  kSolidInterior = 2,  // the voxel grown by one cell lies inside one primitive
};

std::vector<VoxelRegion> ClassifyVoxelRegions(const World& world, double t,
                                              const Pose& grid_pose,
                                              const GridSpec& spec);

}  // namespace scenegt
