#include <numbers>
#include <vector>

#include "doctest.h"
#include "scenegt/pose.h"
#include "scenegt/random.h"

using namespace scenegt;
using Eigen::Vector3d;

namespace {

Pose RandomPose(const Philox4x32& rng, std::uint32_t i) {
  const auto a = rng({i, 1, 0, 0});
  const auto b = rng({i, 2, 0, 0});
  Eigen::Quaterniond q(ToUniform(a[0], -1, 1), ToUniform(a[1], -1, 1), ToUniform(a[2], -1, 1),
                       ToUniform(a[3], -1, 1));
  q.normalize();
  return Pose::FromQuaternion(q, Vector3d(ToUniform(b[0], -50, 50), ToUniform(b[1], -50, 50),
                                          ToUniform(b[2], -5, 5)));
}

}  // namespace

TEST_CASE("sensor world pose composes vehicle and mount") {
  const Pose mount = Pose::Translation({-0.5, 0, 1.8});
  CHECK(SensorWorldPose(mount, Pose::Identity()).translation().isApprox(Vector3d(-0.5, 0, 1.8)));
  const Pose moved = SensorWorldPose(mount, Pose::Translation({5, 0, 0}));
  CHECK((moved.translation() - Vector3d(4.5, 0, 1.8)).norm() < 1e-12);
  const Vector3d ego_t(3, 4, 0);
  const Pose turned = SensorWorldPose(mount, Pose::FromYaw(std::numbers::pi / 2, ego_t));
  CHECK((turned.translation() - (Vector3d(0, -0.5, 1.8) + ego_t)).norm() < 1e-12);
}

TEST_CASE("transform points between frames") {
  const std::vector<Vector3d> pts = {{0, 0, 0}, {1, -2, 3}, {-7, 0.5, 2}};
  const Pose a = Pose::FromYaw(0.3, {1, 2, 3});
  const auto same = TransformPoints(pts, a, a);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((same[i] - pts[i]).norm() < 1e-12);

  const auto shifted = TransformPoints(pts, Pose::Translation({1, 2, 3}), Pose::Identity());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK((shifted[i] - (pts[i] + Vector3d(1, 2, 3))).norm() < 1e-12);
  }
}

TEST_CASE("round trips and inverses on random poses") {
  const Philox4x32 rng(7);
  for (std::uint32_t i = 0; i < 200; ++i) {
    const Pose from = RandomPose(rng, 2 * i);
    const Pose to = RandomPose(rng, 2 * i + 1);
    CHECK(from.IsValid(1e-9));
    const std::vector<Vector3d> pts = {{1, 2, 3}, {-20, 10, 0.5}};
    const auto there = TransformPoints(pts, from, to);
    const auto back = TransformPoints(there, to, from);
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK((back[k] - pts[k]).norm() < 1e-9);
    const Pose id = from * from.inverse();
    CHECK((id.rotation() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(id.translation().norm() < 1e-9);
  }
}

TEST_CASE("invalid rotations are detected") {
  Eigen::Matrix3d scaled = Eigen::Matrix3d::Identity() * 1.01;
  CHECK_FALSE(Pose(scaled, Vector3d::Zero()).IsValid());
  Eigen::Matrix3d mirror = Eigen::Matrix3d::Identity();
  mirror(2, 2) = -1;
  CHECK_FALSE(Pose(mirror, Vector3d::Zero()).IsValid());
  CHECK(Pose::Identity().IsValid());
}
