#include "scenegt/ground_truth.h"

#include "scenegt/errors.h"

namespace scenegt {

Pose EgoVehiclePose(const World& world, double t) {
  return ActorPoseAt(world.ego(), t);
}

Pose RigSensorPose(const World& world, const Rig& rig, std::size_t sensor_id, double t) {
  return SensorWorldPose(rig.mount(sensor_id), EgoVehiclePose(world, t));
}

std::vector<PointCloud> SimulateRigScans(const World& world, const Rig& rig, double t,
                                         const LidarSpec& lidar, std::uint64_t seed,
                                         int threads) {
  CheckTimeInWorld(world, t);
  const Snapshot snapshot(world, t);
  ScanOptions options;
  options.excluded_actors = {world.ego_index()};
  options.threads = threads;
  std::vector<PointCloud> clouds;
  clouds.reserve(rig.sensor_count());
  for (std::size_t s = 0; s < rig.sensor_count(); ++s) {
    clouds.push_back(SimulateScan(snapshot, RigSensorPose(world, rig, s, t), t, lidar,
                                  seed, static_cast<int>(s), options));
  }
  return clouds;
}

LabelGrid LabelClouds(std::span<const PointCloud> clouds, const Pose& ego_sensor_pose,
                      const GridSpec& spec, double r, int threads) {
  if (clouds.empty()) throw PreconditionError("no clouds to label");
  return MajorityVote(AccumulateClouds(clouds, ego_sensor_pose, spec, r, threads));
}

LabelGrid BuildGroundTruth(const World& world, const Rig& rig, const GridSpec& spec,
                           double t, const LidarSpec& lidar, double r,
                           std::uint64_t seed, int threads) {
  spec.Validate();
  const auto clouds = SimulateRigScans(world, rig, t, lidar, seed, threads);
  return LabelClouds(clouds, RigSensorPose(world, rig, 0, t), spec, r, threads);
}

}  // namespace scenegt
