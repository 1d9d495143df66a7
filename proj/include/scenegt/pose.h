#pragma once

#include <span>
#include <vector>

#include "Eigen/Core"
#include "Eigen/Geometry"

namespace scenegt {

// Rigid transform mapping points from a child frame into a parent frame:
// p_parent = rotation * p_child + translation.
class Pose {
 public:
  Pose() = default;
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose Identity() { return {}; }
  static Pose Translation(const Eigen::Vector3d& t) {
    return {Eigen::Matrix3d::Identity(), t};
  }
  static Pose FromYaw(double yaw_rad, const Eigen::Vector3d& t);
  static Pose FromQuaternion(const Eigen::Quaterniond& q,
                             const Eigen::Vector3d& t);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation_); }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  Pose operator*(const Pose& rhs) const {
    return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
  }
  Pose inverse() const {
    const Eigen::Matrix3d rt = rotation_.transpose();
    return {rt, -(rt * translation_)};
  }

  // Orthonormal with det +1 within `tol`.
  bool IsValid(double tol = 1e-9) const;

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

// Vehicle (or parent) pose composed with a mount expressed in that frame.
inline Pose SensorWorldPose(const Pose& mount, const Pose& vehicle) {
  return vehicle * mount;
}

// Relative transform taking coordinates in `from` into coordinates in `to`,
// both given as poses in a common parent frame.
inline Pose RelativePose(const Pose& from, const Pose& to) {
  return to.inverse() * from;
}

std::vector<Eigen::Vector3d> TransformPoints(
    std::span<const Eigen::Vector3d> points, const Pose& from, const Pose& to);

}  // namespace scenegt
