#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "scenegt/labels.h"
#include "scenegt/lidar.h"
#include "scenegt/pose.h"

namespace scenegt {

inline constexpr double kDefaultFreeStep = 1.5;

struct Observation {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  RawLabel label = RawLabel::kFree;  // kFree marks a free-space sample

  static Observation Occupied(const Eigen::Vector3d& p, RawLabel label) {
    return {p, label};
  }
  static Observation Free(const Eigen::Vector3d& p) { return {p, RawLabel::kFree}; }
  bool is_free() const { return label == RawLabel::kFree; }
};

struct ObservationSet {
  std::vector<Observation> observations;
  double t = 0.0;
  std::set<int> source_sensor_ids;
  std::size_t skipped_points = 0;  // endpoints at the sensor origin
};

// Visits the occupied endpoint and then the free samples of every point, in
// the sensor frame: free samples sit at |x| - r, |x| - 2r, ... while positive.
// Zero-length points have no direction and are skipped; returns their count.
template <typename Visitor>
std::size_t ForEachObservation(std::span<const SemanticPoint> points, double r,
                               Visitor&& visit) {
  std::size_t skipped = 0;
  for (const SemanticPoint& point : points) {
    const Eigen::Vector3d x = point.position.cast<double>();
    const double norm = x.norm();
    if (norm == 0.0) {
      ++skipped;
      continue;
    }
    visit(x, point.label);
    const Eigen::Vector3d unit = x / norm;
    for (double d = norm - r; d > 0.0; d -= r) visit(Eigen::Vector3d(d * unit), RawLabel::kFree);
  }
  return skipped;
}

// Occupied and free observations of one cloud, in its sensor frame.
ObservationSet RayTraceObservations(const PointCloud& cloud, double r);

// Re-expresses sensor-frame observations in the ego sensor frame.
ObservationSet ToEgoFrame(const ObservationSet& obs, const Pose& sensor_pose,
                          const Pose& ego_sensor_pose);

// Multiset union of per-sensor observation sets taken at the same instant.
ObservationSet AggregateObservations(std::span<const ObservationSet> per_sensor);

// Number of free samples Algorithm-style stepping emits for an endpoint at
// distance `norm`.
std::size_t FreeSampleCount(double norm, double r);

}  // namespace scenegt
