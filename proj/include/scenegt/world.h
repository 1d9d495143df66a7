#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "Eigen/Geometry"
#include "scenegt/labels.h"
#include "scenegt/pose.h"

namespace scenegt {

// Axis-aligned box in its own frame. For statics that frame is the world.
struct Box {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
  RawLabel label = RawLabel::kOther;
};

struct Keyframe {
  double t = 0.0;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
};

struct Actor {
  Box box;  // in the actor frame
  std::vector<Keyframe> trajectory;
  bool is_ego = false;
};

struct GroundRegion {
  Eigen::Vector2d min = Eigen::Vector2d::Zero();
  Eigen::Vector2d max = Eigen::Vector2d::Zero();
  RawLabel label = RawLabel::kRoad;
};

struct Ground {
  double height = 0.0;
  RawLabel default_label = RawLabel::kGround;
  // First region containing (x, y) wins; regions are half-open.
  std::vector<GroundRegion> regions;

  RawLabel LabelAt(double x, double y) const;
};

struct RayHit {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  double distance = 0.0;
  RawLabel label = RawLabel::kUnlabeled;
  std::optional<std::size_t> actor_index;
};

// Piecewise-linear keyframe interpolation, clamped outside the keyframe span.
// Rotations use shortest-arc slerp.
Pose ActorPoseAt(const Actor& actor, double t);

// Immutable after construction; all queries are safe from any thread.
class World {
 public:
  World(std::vector<Box> statics, std::vector<Actor> actors,
        std::optional<Ground> ground, double duration_s, double tick_s);

  // An empty world of the given duration: no ground, no statics, and a single
  // degenerate ego actor parked at the origin.
  static World Empty(double duration_s = 1.0, double tick_s = 0.1);

  const std::vector<Box>& statics() const { return statics_; }
  const std::vector<Actor>& actors() const { return actors_; }
  const std::optional<Ground>& ground() const { return ground_; }
  double duration() const { return duration_; }
  double tick() const { return tick_; }
  std::size_t ego_index() const { return ego_index_; }
  const Actor& ego() const { return actors_[ego_index_]; }

  // Number of ticks in the duration (frames are 0..frame_count()).
  std::int64_t frame_count() const;

 private:
  std::vector<Box> statics_;
  std::vector<Actor> actors_;
  std::optional<Ground> ground_;
  double duration_;
  double tick_;
  std::size_t ego_index_ = 0;
};

// The world frozen at one instant: every box resolved into the world frame and
// binned on a horizontal uniform grid for ray casting.
class Snapshot {
 public:
  Snapshot(const World& world, double t);

  // Nearest surface hit along a unit direction within `max_range`. Actors
  // listed in `excluded_actors` are transparent. A ray starting inside a
  // primitive or below ground is blocked and returns nothing.
  std::optional<RayHit> Cast(const Eigen::Vector3d& origin,
                             const Eigen::Vector3d& direction, double max_range,
                             std::span<const std::size_t> excluded_actors = {}) const;

  // Same query by exhaustive scan over every primitive (test oracle).
  std::optional<RayHit> CastBruteForce(
      const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
      double max_range, std::span<const std::size_t> excluded_actors = {}) const;

  // Label of the primitive containing `point`; the one whose surface is
  // nearest wins when several overlap. RawLabel::kFree in open air.
  RawLabel LabelAt(const Eigen::Vector3d& point) const;

  struct ResolvedBox {
    Eigen::Matrix3d rotation;  // local -> world
    Eigen::Vector3d center;    // world
    Eigen::Vector3d half_extents;
    Eigen::Vector3d aabb_min;  // world-frame bounds of the oriented box
    Eigen::Vector3d aabb_max;
    RawLabel label;
    std::optional<std::size_t> actor_index;
    bool axis_aligned;
  };
  const std::vector<ResolvedBox>& boxes() const { return boxes_; }
  const std::optional<Ground>& ground() const { return ground_; }

 private:
  struct Candidate {
    double t;
    std::size_t order;  // 0 = ground, 1 + i = boxes_[i]
  };
  // Returns false when the origin is inside the box (ray blocked).
  bool IntersectBox(std::size_t index, const Eigen::Vector3d& origin,
                    const Eigen::Vector3d& direction, double max_t,
                    Candidate& best) const;
  bool IsExcluded(std::size_t index, std::span<const std::size_t> excluded) const;
  std::optional<RayHit> MakeHit(const Candidate& best, const Eigen::Vector3d& origin,
                                const Eigen::Vector3d& direction) const;

  std::vector<ResolvedBox> boxes_;
  std::optional<Ground> ground_;

  // Horizontal bins.
  Eigen::Vector2d bin_origin_ = Eigen::Vector2d::Zero();
  double bin_size_ = 2.0;
  int bins_x_ = 0;
  int bins_y_ = 0;
  std::vector<std::uint32_t> bin_offsets_;
  std::vector<std::uint32_t> bin_items_;
};

// Convenience wrappers building a Snapshot per call.
std::optional<RayHit> SemanticRaycast(const World& world, double t,
                                      const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& direction,
                                      double max_range,
                                      std::span<const std::size_t> excluded_actors = {});
RawLabel QueryLabel(const World& world, double t, const Eigen::Vector3d& point);

}  // namespace scenegt
