#include "scenegt/lidar.h"

#include <cmath>
#include <numbers>
#include <optional>

#include "scenegt/errors.h"
#include "scenegt/parallel.h"
#include "scenegt/random.h"

namespace scenegt {
namespace {

constexpr std::uint32_t kNoiseDomain = 0x4E4F4953;  // "NOIS"

double Radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void LidarSpec::Validate() const {
  if (channels < 1) throw PreconditionError("lidar channels must be >= 1");
  if (azimuth_steps < 4) throw PreconditionError("lidar azimuth_steps must be >= 4");
  if (!(max_range > 0.0)) throw PreconditionError("lidar max_range must be positive");
  if (!(noise_bound >= 0.0)) throw PreconditionError("lidar noise_bound must be >= 0");
  if (vertical_fov_min_deg > vertical_fov_max_deg) {
    throw PreconditionError("lidar vertical fov min exceeds max");
  }
  if (!(rate_hz > 0.0)) throw PreconditionError("lidar rate must be positive");
}

std::vector<Eigen::Vector3d> ScanDirections(const LidarSpec& spec) {
  spec.Validate();
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(spec.rays_per_scan());
  const double lo = spec.vertical_fov_min_deg;
  const double hi = spec.vertical_fov_max_deg;
  for (int c = 0; c < spec.channels; ++c) {
    const double elevation_deg =
        spec.channels == 1 ? lo : lo + (hi - lo) * c / (spec.channels - 1);
    const double elevation = Radians(elevation_deg);
    const double ce = std::cos(elevation);
    const double se = std::sin(elevation);
    for (int a = 0; a < spec.azimuth_steps; ++a) {
      const double azimuth = 2.0 * std::numbers::pi * a / spec.azimuth_steps;
      Eigen::Vector3d d(ce * std::cos(azimuth), ce * std::sin(azimuth), se);
      dirs.push_back(d.normalized());
    }
  }
  return dirs;
}

Eigen::Vector3d NoiseOffset(std::uint64_t seed, int sensor_id, std::uint64_t ray_index,
                            double noise_bound) {
  if (noise_bound == 0.0) return Eigen::Vector3d::Zero();
  const double half_width = noise_bound / std::sqrt(3.0);
  const Philox4x32 rng(seed);
  const auto block = rng({static_cast<std::uint32_t>(ray_index),
                          static_cast<std::uint32_t>(ray_index >> 32),
                          static_cast<std::uint32_t>(sensor_id), kNoiseDomain});
  return {ToUniform(block[0], -half_width, half_width),
          ToUniform(block[1], -half_width, half_width),
          ToUniform(block[2], -half_width, half_width)};
}

void CheckTimeInWorld(const World& world, double t) {
  if (!(t >= -1e-9 && t <= world.duration() + 1e-9)) {
    throw RangeError("time " + std::to_string(t) + " outside world duration [0, " +
                     std::to_string(world.duration()) + "]");
  }
}

PointCloud SimulateScan(const Snapshot& snapshot, const Pose& sensor_pose, double t,
                        const LidarSpec& spec, std::uint64_t seed, int sensor_id,
                        const ScanOptions& options) {
  spec.Validate();
  if (!sensor_pose.IsValid()) throw PreconditionError("sensor pose is not a rigid transform");
  const std::vector<Eigen::Vector3d> dirs = ScanDirections(spec);
  const Eigen::Vector3d origin = sensor_pose.translation();
  const Eigen::Matrix3d& rot = sensor_pose.rotation();
  const Eigen::Matrix3d rot_t = rot.transpose();

  std::vector<std::optional<SemanticPoint>> slots(dirs.size());
  ParallelChunks(dirs.size(), options.threads, [&](std::size_t, std::size_t begin,
                                                    std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d world_dir = (rot * dirs[i]).normalized();
      const auto hit = snapshot.Cast(origin, world_dir, spec.max_range,
                                     options.excluded_actors);
      if (!hit || hit->label == RawLabel::kUnlabeled) continue;
      const Eigen::Vector3d local = rot_t * (hit->point - origin) +
                                    NoiseOffset(seed, sensor_id, i, spec.noise_bound);
      slots[i] = SemanticPoint{local.cast<float>(), hit->label};
    }
  });

  PointCloud cloud;
  cloud.sensor_pose = sensor_pose;
  cloud.t = t;
  cloud.sensor_id = sensor_id;
  for (const auto& slot : slots) {
    if (slot) cloud.points.push_back(*slot);
  }
  return cloud;
}

PointCloud SimulateScan(const World& world, const Pose& sensor_pose, double t,
                        const LidarSpec& spec, std::uint64_t seed, int sensor_id,
                        int threads) {
  CheckTimeInWorld(world, t);
  ScanOptions options;
  options.excluded_actors = {world.ego_index()};
  options.threads = threads;
  return SimulateScan(Snapshot(world, t), sensor_pose, t, spec, seed, sensor_id, options);
}

}  // namespace scenegt
