#pragma once

#include <cstdint>
#include <vector>

#include "scenegt/grid.h"
#include "scenegt/lidar.h"
#include "scenegt/rig.h"
#include "scenegt/world.h"

namespace scenegt {

// Ego vehicle pose in the world at time t.
Pose EgoVehiclePose(const World& world, double t);

// World pose of sensor `sensor_id` of the rig at time t (0 is the ego sensor).
Pose RigSensorPose(const World& world, const Rig& rig, std::size_t sensor_id, double t);

// One scan per rig sensor at the single instant t; element i is sensor i.
std::vector<PointCloud> SimulateRigScans(const World& world, const Rig& rig, double t,
                                         const LidarSpec& lidar, std::uint64_t seed,
                                         int threads = 1);

// Multi-sensor labeling of the instant t in the ego sensor frame: scan with
// every rig sensor, free-space trace each cloud, union the observations and
// take the per-voxel majority.
LabelGrid BuildGroundTruth(const World& world, const Rig& rig, const GridSpec& spec,
                           double t, const LidarSpec& lidar, double r,
                           std::uint64_t seed, int threads = 1);

// Labels already simulated clouds into the frame of `ego_sensor_pose`.
LabelGrid LabelClouds(std::span<const PointCloud> clouds, const Pose& ego_sensor_pose,
                      const GridSpec& spec, double r, int threads = 1);

}  // namespace scenegt
