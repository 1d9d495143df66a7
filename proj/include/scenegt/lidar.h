#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "scenegt/labels.h"
#include "scenegt/pose.h"
#include "scenegt/world.h"

namespace scenegt {

// Spinning multi-channel LiDAR. Defaults follow a 64-beam Velodyne HDL-64E:
// 64 x 2048 = 131072 rays per revolution.
struct LidarSpec {
  int channels = 64;
  double vertical_fov_min_deg = -24.8;
  double vertical_fov_max_deg = 2.0;
  int azimuth_steps = 2048;
  double max_range = 50.0;
  double noise_bound = 0.02;  // worst-case Euclidean error, meters
  double rate_hz = 10.0;

  void Validate() const;
  std::size_t rays_per_scan() const {
    return static_cast<std::size_t>(channels) * static_cast<std::size_t>(azimuth_steps);
  }
};

struct SemanticPoint {
  Eigen::Vector3f position = Eigen::Vector3f::Zero();  // sensor frame
  RawLabel label = RawLabel::kUnlabeled;
  friend bool operator==(const SemanticPoint&, const SemanticPoint&) = default;
};

struct PointCloud {
  std::vector<SemanticPoint> points;
  Pose sensor_pose;  // sensor -> world
  double t = 0.0;
  int sensor_id = 0;  // 0 is the ego sensor
};

// Ray index = channel * azimuth_steps + azimuth_step. Elevations span the
// vertical field of view inclusive of both ends; azimuths cover [0, 360).
std::vector<Eigen::Vector3d> ScanDirections(const LidarSpec& spec);

struct ScanOptions {
  // Actors that never produce returns (the vehicle carrying the sensor).
  std::vector<std::size_t> excluded_actors;
  int threads = 1;
};

// One revolution against the world frozen at t. Each hit becomes a sensor
// frame point with per-axis uniform noise of half-width noise_bound/sqrt(3),
// keyed on (seed, sensor_id, ray index). Misses and Unlabeled hits are dropped.
PointCloud SimulateScan(const Snapshot& snapshot, const Pose& sensor_pose, double t,
                        const LidarSpec& spec, std::uint64_t seed, int sensor_id,
                        const ScanOptions& options);

// Validates t against the world duration and excludes the ego actor.
PointCloud SimulateScan(const World& world, const Pose& sensor_pose, double t,
                        const LidarSpec& spec, std::uint64_t seed, int sensor_id,
                        int threads = 1);

// Noise offset applied to a ray; exposed for tests.
Eigen::Vector3d NoiseOffset(std::uint64_t seed, int sensor_id, std::uint64_t ray_index,
                            double noise_bound);

void CheckTimeInWorld(const World& world, double t);

}  // namespace scenegt
