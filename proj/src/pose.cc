#include "scenegt/pose.h"

#include <cmath>

namespace scenegt {

Pose Pose::FromYaw(double yaw_rad, const Eigen::Vector3d& t) {
  return {Eigen::AngleAxisd(yaw_rad, Eigen::Vector3d::UnitZ()).toRotationMatrix(),
          t};
}

Pose Pose::FromQuaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
  return {q.normalized().toRotationMatrix(), t};
}

bool Pose::IsValid(double tol) const {
  if (!rotation_.allFinite() || !translation_.allFinite()) return false;
  const Eigen::Matrix3d err =
      rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation_.determinant() - 1.0) <= tol;
}

std::vector<Eigen::Vector3d> TransformPoints(
    std::span<const Eigen::Vector3d> points, const Pose& from, const Pose& to) {
  const Pose rel = RelativePose(from, to);
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(rel * p);
  return out;
}

}  // namespace scenegt
