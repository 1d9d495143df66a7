#include "doctest.h"
#include "scenegt/errors.h"
#include "scenegt/ground_truth.h"
#include "scenegt/rig.h"

using namespace scenegt;
using Eigen::Vector3d;

TEST_CASE("rig sizes and bounds") {
  const Rig none = SampleRig(RigBounds{}, 0, 3);
  CHECK(none.sensor_count() == 1);
  CHECK(none.aux_mounts.empty());
  CHECK(none.ego_mount.translation() == Vector3d(-0.5, 0, 1.8));

  const Rig rig = SampleRig(RigBounds{}, 20, 3);
  CHECK(rig.aux_mounts.size() == 20);
  for (const Pose& m : rig.aux_mounts) {
    CHECK(rig.bounds.Contains(m.translation()));
    CHECK(m.rotation() == Eigen::Matrix3d::Identity());
  }
  const Rig other = SampleRig(RigBounds{}, 20, 4);
  bool differs = false;
  for (std::size_t i = 0; i < 20; ++i) differs |= !(rig.aux_mounts[i] == other.aux_mounts[i]);
  CHECK(differs);
  CHECK_THROWS_AS(SampleRig(RigBounds{}, -1, 3), PreconditionError);
  RigBounds bad;
  bad.min.z() = 7.0;
  CHECK_THROWS_AS(SampleRig(bad, 2, 3), PreconditionError);
}

TEST_CASE("smaller rigs are prefixes of larger ones") {
  const Rig small = SampleRig(RigBounds{}, 5, 11);
  const Rig large = SampleRig(RigBounds{}, 20, 11);
  for (std::size_t i = 0; i < 5; ++i) CHECK(small.aux_mounts[i] == large.aux_mounts[i]);
}

TEST_CASE("mount sampling is uniform over the box") {
  const RigBounds bounds;
  const Rig rig = SampleRig(bounds, 10000, 2024);
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = bounds.min[axis];
    const double hi = bounds.max[axis];
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const Pose& m : rig.aux_mounts) {
      sum += m.translation()[axis];
      sum_sq += m.translation()[axis] * m.translation()[axis];
    }
    const double n = rig.aux_mounts.size();
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    const double width = hi - lo;
    CHECK(std::abs(mean - (lo + hi) / 2) < 0.02 * width);
    CHECK(std::abs(var / (width * width / 12.0) - 1.0) < 0.05);
  }
}

TEST_CASE("sensor poses follow the ego vehicle") {
  Actor ego;
  ego.box = Box{{0, 0, 0.75}, {2.3, 0.95, 0.75}, RawLabel::kVehicles};
  ego.trajectory = {Keyframe{0, {0, 0, 0}, Eigen::Quaterniond::Identity()},
                    Keyframe{10, {50, 0, 0}, Eigen::Quaterniond::Identity()}};
  ego.is_ego = true;
  const World world({}, {ego}, std::nullopt, 10.0, 0.1);
  Rig rig;
  rig.aux_mounts = {Pose::Translation({0, 2, 3})};
  CHECK((RigSensorPose(world, rig, 0, 2.0).translation() - Vector3d(9.5, 0, 1.8)).norm() < 1e-12);
  CHECK((RigSensorPose(world, rig, 1, 2.0).translation() - Vector3d(10, 2, 3)).norm() < 1e-12);
  CHECK_THROWS(RigSensorPose(world, rig, 2, 2.0));
}
