#include "scenegt/labeler.h"

#include <cmath>

#include "scenegt/errors.h"

namespace scenegt {

ObservationSet RayTraceObservations(const PointCloud& cloud, double r) {
  if (!(r > 0.0)) throw PreconditionError("free-space step r must be positive");
  ObservationSet out;
  out.t = cloud.t;
  out.source_sensor_ids.insert(cloud.sensor_id);
  out.skipped_points = ForEachObservation(
      cloud.points, r, [&](const Eigen::Vector3d& p, RawLabel label) {
        out.observations.push_back({p, label});
      });
  return out;
}

ObservationSet ToEgoFrame(const ObservationSet& obs, const Pose& sensor_pose,
                          const Pose& ego_sensor_pose) {
  const Pose rel = RelativePose(sensor_pose, ego_sensor_pose);
  ObservationSet out;
  out.t = obs.t;
  out.source_sensor_ids = obs.source_sensor_ids;
  out.skipped_points = obs.skipped_points;
  out.observations.reserve(obs.observations.size());
  for (const Observation& o : obs.observations) {
    out.observations.push_back({rel * o.position, o.label});
  }
  return out;
}

ObservationSet AggregateObservations(std::span<const ObservationSet> per_sensor) {
  if (per_sensor.empty()) throw PreconditionError("no observation sets to aggregate");
  ObservationSet out;
  out.t = per_sensor.front().t;
  std::size_t total = 0;
  for (const auto& set : per_sensor) total += set.observations.size();
  out.observations.reserve(total);
  for (const auto& set : per_sensor) {
    if (std::abs(set.t - out.t) > 1e-9) {
      throw PreconditionError("observation sets taken at different times");
    }
    out.observations.insert(out.observations.end(), set.observations.begin(),
                            set.observations.end());
    out.source_sensor_ids.insert(set.source_sensor_ids.begin(),
                                 set.source_sensor_ids.end());
    out.skipped_points += set.skipped_points;
  }
  return out;
}

std::size_t FreeSampleCount(double norm, double r) {
  std::size_t n = 0;
  for (double d = norm - r; d > 0.0; d -= r) ++n;
  return n;
}

}  // namespace scenegt
