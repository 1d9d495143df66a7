#pragma once

#include <cstdint>
#include <vector>

#include "Eigen/Core"
#include "scenegt/pose.h"

namespace scenegt {

// Sampling box for auxiliary sensors, in the ego vehicle frame.
struct RigBounds {
  Eigen::Vector3d min = Eigen::Vector3d(-25.6, -25.6, 1.0);
  Eigen::Vector3d max = Eigen::Vector3d(25.6, 25.6, 6.0);

  void Validate() const;
  bool Contains(const Eigen::Vector3d& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

// Ego sensor mount: half a meter behind the vehicle center, 1.8 m above ground.
inline const Eigen::Vector3d kEgoMountTranslation(-0.5, 0.0, 1.8);

// Mounts are fixed relative to the ego vehicle for a whole scene.
struct Rig {
  Pose ego_mount = Pose::Translation(kEgoMountTranslation);
  std::vector<Pose> aux_mounts;
  RigBounds bounds;
  std::uint64_t seed = 0;

  std::size_t sensor_count() const { return 1 + aux_mounts.size(); }
  // Sensor 0 is the ego sensor; sensor i > 0 is aux_mounts[i - 1].
  const Pose& mount(std::size_t sensor_id) const {
    return sensor_id == 0 ? ego_mount : aux_mounts.at(sensor_id - 1);
  }
};

// Draws n_aux mount translations i.i.d. uniform over `bounds`. Mount i depends
// only on (seed, i), so a rig with fewer sensors is a prefix of a larger one.
Rig SampleRig(const RigBounds& bounds, int n_aux, std::uint64_t seed);

}  // namespace scenegt
