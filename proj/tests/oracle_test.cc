#include "doctest.h"
#include "scenegt/oracle.h"
#include "scenegt/world_gen.h"

using namespace scenegt;
using Eigen::Vector3d;

namespace {

Actor Ego() {
  Actor a;
  a.box = Box{{0, 0, 0.75}, {2.3, 0.95, 0.75}, RawLabel::kVehicles};
  a.trajectory = {Keyframe{0, {-200, 0, 0}, Eigen::Quaterniond::Identity()}};
  a.is_ego = true;
  return a;
}

}  // namespace

TEST_CASE("oracle grid labels boxes and leaves open air free") {
  const Box building{{5.05, 5.05, 0}, {2, 2, 0.7}, RawLabel::kBuilding};
  const World world({building}, {Ego()}, std::nullopt, 1.0, 0.1);
  const GridSpec spec;
  const LabelGrid grid = OracleGrid(world, 0.0, Pose::Identity(), spec);
  CHECK(grid.valid_count() == spec.voxel_count());
  CHECK(grid.label(*VoxelIndex(spec, {5.05, 5.05, 0})) == Label::kBuilding);
  CHECK(grid.label(*VoxelIndex(spec, {-5, -5, 0})) == Label::kFree);
  // Just outside the face, one voxel further out, is free.
  CHECK(grid.label(*VoxelIndex(spec, {7.05 + 0.45, 5.05, 0})) == Label::kFree);
  CHECK(grid.label(*VoxelIndex(spec, {7.05 - 0.01, 5.05, 0})) == Label::kBuilding);

  std::size_t building_voxels = 0;
  for (std::size_t v = 0; v < spec.voxel_count(); ++v) {
    building_voxels += grid.label(v) == Label::kBuilding;
    // A labeled center agrees with the point query.
    const Vector3d c = spec.VoxelCenter(spec.Unflat(v));
    const Label at_center = Remap(QueryLabel(world, 0.0, c));
    if (at_center != Label::kFree) CHECK(grid.label(v) == at_center);
  }
  // x, y: 4.0 m span over 0.4 m cells touching 11 cells (faces off-grid);
  // z: [-0.7, 0.7] over 0.375 m cells touches 4 or 5.
  CHECK(building_voxels >= 11 * 11 * 4);
  CHECK(building_voxels <= 11 * 11 * 5);
}

TEST_CASE("oracle follows moving actors") {
  Actor mover = Ego();
  mover.is_ego = false;
  mover.trajectory = {Keyframe{0, {10, 0, -1}, Eigen::Quaterniond::Identity()},
                      Keyframe{10, {-10, 0, -1}, Eigen::Quaterniond::Identity()}};
  const World world({}, {Ego(), mover}, std::nullopt, 10.0, 0.1);
  const GridSpec spec;
  const LabelGrid at0 = OracleGrid(world, 0.0, Pose::Identity(), spec);
  const LabelGrid at5 = OracleGrid(world, 5.0, Pose::Identity(), spec);
  const auto probe = [&](const LabelGrid& g, double x) {
    return g.label(*VoxelIndex(spec, {x, 0, -0.2}));
  };
  CHECK(probe(at0, 10) == Label::kVehicles);
  CHECK(probe(at0, 0) == Label::kFree);
  CHECK(probe(at5, 0) == Label::kVehicles);
  CHECK(probe(at5, 10) == Label::kFree);
}

TEST_CASE("oracle grid in a moved frame") {
  const Box pole{{20.2, 3.2, 2}, {0.15, 0.15, 2}, RawLabel::kPole};
  const World world({pole}, {Ego()}, std::nullopt, 1.0, 0.1);
  const GridSpec spec;
  const Pose frame = Pose::FromYaw(M_PI / 2, {20, 0, 1.8});
  const LabelGrid grid = OracleGrid(world, 0.0, frame, spec);
  // World (20.2, 3.2, 1.8) is grid (3.2, -0.2, 0).
  CHECK(grid.label(*VoxelIndex(spec, {3.2, -0.2, 0})) == Label::kPole);
  CHECK(grid.label(*VoxelIndex(spec, {-3.2, 0.2, 0})) == Label::kFree);
}

TEST_CASE("voxel regions") {
  Ground ground;
  const Box building{{6, 6, 3}, {3, 3, 3}, RawLabel::kBuilding};
  const World world({building}, {Ego()}, ground, 1.0, 0.1);
  const GridSpec spec;
  const Pose frame = Pose::Translation({0, 0, 1.8});
  const auto regions = ClassifyVoxelRegions(world, 0.0, frame, spec);
  const LabelGrid oracle = OracleGrid(world, 0.0, frame, spec);
  std::size_t free = 0;
  std::size_t solid = 0;
  for (std::size_t v = 0; v < spec.voxel_count(); ++v) {
    const VoxelCoord c = spec.Unflat(v);
    const Vector3d center = frame * spec.VoxelCenter(c);
    if (regions[v] == VoxelRegion::kFreeInterior) {
      ++free;
      CHECK(oracle.label(v) == Label::kFree);
      // Every neighbor is free too.
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            const VoxelCoord n{c.x + dx, c.y + dy, c.z + dz};
            if (n.x < 0 || n.y < 0 || n.z < 0 || n.x >= 128 || n.y >= 128 || n.z >= 8) continue;
            REQUIRE(oracle.label(n) == Label::kFree);
          }
    } else if (regions[v] == VoxelRegion::kSolidInterior) {
      ++solid;
      CHECK(oracle.label(v) != Label::kFree);
      CHECK(Remap(QueryLabel(world, 0.0, center)) == oracle.label(v));
    }
  }
  CHECK(free > 50000);
  CHECK(solid > 100);
}
