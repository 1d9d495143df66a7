#include "scenegt/world.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scenegt/errors.h"

namespace scenegt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallelEps = 1e-300;

// Slab test against [lo, hi]. Returns the entry/exit parameters, or nothing
// when the line misses the box.
std::optional<std::pair<double, double>> Slab(const Eigen::Vector3d& origin,
                                              const Eigen::Vector3d& direction,
                                              const Eigen::Vector3d& lo,
                                              const Eigen::Vector3d& hi) {
  double t_near = -kInf;
  double t_far = kInf;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = origin[axis];
    const double d = direction[axis];
    if (std::abs(d) < kParallelEps) {
      if (o < lo[axis] || o > hi[axis]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d;
    double t0 = (lo[axis] - o) * inv;
    double t1 = (hi[axis] - o) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  return std::make_pair(t_near, t_far);
}

bool Better(double t, std::size_t order, double best_t, std::size_t best_order) {
  return t < best_t || (t == best_t && order < best_order);
}

}  // namespace

RawLabel Ground::LabelAt(double x, double y) const {
  for (const auto& region : regions) {
    if (x >= region.min.x() && x < region.max.x() && y >= region.min.y() &&
        y < region.max.y()) {
      return region.label;
    }
  }
  return default_label;
}

Pose ActorPoseAt(const Actor& actor, double t) {
  const auto& keys = actor.trajectory;
  const auto to_pose = [](const Keyframe& k) {
    return Pose::FromQuaternion(k.rotation, k.translation);
  };
  if (t <= keys.front().t) return to_pose(keys.front());
  if (t >= keys.back().t) return to_pose(keys.back());
  const auto upper = std::upper_bound(
      keys.begin(), keys.end(), t,
      [](double value, const Keyframe& k) { return value < k.t; });
  const Keyframe& b = *upper;
  const Keyframe& a = *(upper - 1);
  const double alpha = (t - a.t) / (b.t - a.t);
  const Eigen::Vector3d translation =
      a.translation + alpha * (b.translation - a.translation);
  const Eigen::Quaterniond rotation =
      a.rotation.normalized().slerp(alpha, b.rotation.normalized());
  return Pose::FromQuaternion(rotation, translation);
}

World::World(std::vector<Box> statics, std::vector<Actor> actors,
             std::optional<Ground> ground, double duration_s, double tick_s)
    : statics_(std::move(statics)),
      actors_(std::move(actors)),
      ground_(std::move(ground)),
      duration_(duration_s),
      tick_(tick_s) {
  if (!(tick_ > 0.0)) throw PreconditionError("world tick must be positive");
  const double ticks = duration_ / tick_;
  if (!(duration_ > 0.0) || std::abs(ticks - std::round(ticks)) > 1e-6) {
    throw PreconditionError("world duration must be a positive multiple of tick");
  }
  const auto check_box = [](const Box& box) {
    if (!(box.half_extents.array() > 0.0).all()) {
      throw PreconditionError("box half-extents must be strictly positive");
    }
  };
  for (const auto& box : statics_) check_box(box);
  std::size_t ego_count = 0;
  for (std::size_t i = 0; i < actors_.size(); ++i) {
    const Actor& actor = actors_[i];
    check_box(actor.box);
    if (actor.trajectory.empty()) {
      throw PreconditionError("actor " + std::to_string(i) + " has no keyframes");
    }
    for (std::size_t k = 1; k < actor.trajectory.size(); ++k) {
      if (!(actor.trajectory[k].t > actor.trajectory[k - 1].t)) {
        throw PreconditionError("actor " + std::to_string(i) +
                                " keyframe times are not strictly increasing");
      }
    }
    if (actor.is_ego) {
      ++ego_count;
      ego_index_ = i;
    }
  }
  if (ego_count != 1) {
    throw PreconditionError("world must contain exactly one ego actor");
  }
}

World World::Empty(double duration_s, double tick_s) {
  Actor ego;
  ego.box.half_extents = Eigen::Vector3d::Constant(1e-3);
  ego.box.label = RawLabel::kVehicles;
  ego.trajectory.push_back(Keyframe{});
  ego.is_ego = true;
  return World({}, {ego}, std::nullopt, duration_s, tick_s);
}

std::int64_t World::frame_count() const {
  return static_cast<std::int64_t>(std::llround(duration_ / tick_));
}

Snapshot::Snapshot(const World& world, double t) : ground_(world.ground()) {
  boxes_.reserve(world.statics().size() + world.actors().size());
  for (const Box& box : world.statics()) {
    boxes_.push_back({Eigen::Matrix3d::Identity(), box.center, box.half_extents,
                      box.center - box.half_extents, box.center + box.half_extents,
                      box.label, std::nullopt, true});
  }
  for (std::size_t i = 0; i < world.actors().size(); ++i) {
    const Actor& actor = world.actors()[i];
    const Pose pose = ActorPoseAt(actor, t);
    const Eigen::Vector3d center = pose * actor.box.center;
    const Eigen::Vector3d extent =
        pose.rotation().cwiseAbs() * actor.box.half_extents;
    const bool aligned = pose.rotation() == Eigen::Matrix3d::Identity();
    boxes_.push_back({pose.rotation(), center, actor.box.half_extents,
                      center - extent, center + extent, actor.box.label, i,
                      aligned});
  }
  if (boxes_.empty()) return;

  Eigen::Vector2d lo = Eigen::Vector2d::Constant(kInf);
  Eigen::Vector2d hi = Eigen::Vector2d::Constant(-kInf);
  for (const auto& b : boxes_) {
    lo = lo.cwiseMin(b.aabb_min.head<2>());
    hi = hi.cwiseMax(b.aabb_max.head<2>());
  }
  constexpr double kMaxBins = 1 << 20;
  const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-6);
  while ((span.x() / bin_size_ + 1) * (span.y() / bin_size_ + 1) > kMaxBins) {
    bin_size_ *= 2.0;
  }
  bin_origin_ = lo;
  bins_x_ = static_cast<int>(std::floor(span.x() / bin_size_)) + 1;
  bins_y_ = static_cast<int>(std::floor(span.y() / bin_size_)) + 1;

  const auto bin_range = [&](const ResolvedBox& b, int& x0, int& x1, int& y0,
                             int& y1) {
    x0 = std::clamp(static_cast<int>(std::floor((b.aabb_min.x() - lo.x()) / bin_size_)), 0, bins_x_ - 1);
    x1 = std::clamp(static_cast<int>(std::floor((b.aabb_max.x() - lo.x()) / bin_size_)), 0, bins_x_ - 1);
    y0 = std::clamp(static_cast<int>(std::floor((b.aabb_min.y() - lo.y()) / bin_size_)), 0, bins_y_ - 1);
    y1 = std::clamp(static_cast<int>(std::floor((b.aabb_max.y() - lo.y()) / bin_size_)), 0, bins_y_ - 1);
  };
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(bins_x_) * bins_y_ + 1, 0);
  for (const auto& b : boxes_) {
    int x0, x1, y0, y1;
    bin_range(b, x0, x1, y0, y1);
    for (int x = x0; x <= x1; ++x)
      for (int y = y0; y <= y1; ++y) ++counts[static_cast<std::size_t>(x) * bins_y_ + y + 1];
  }
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  bin_offsets_ = counts;
  bin_items_.resize(counts.back());
  for (std::uint32_t i = 0; i < boxes_.size(); ++i) {
    int x0, x1, y0, y1;
    bin_range(boxes_[i], x0, x1, y0, y1);
    for (int x = x0; x <= x1; ++x)
      for (int y = y0; y <= y1; ++y) bin_items_[counts[static_cast<std::size_t>(x) * bins_y_ + y]++] = i;
  }
}

bool Snapshot::IsExcluded(std::size_t index,
                          std::span<const std::size_t> excluded) const {
  const auto& actor = boxes_[index].actor_index;
  return actor && std::find(excluded.begin(), excluded.end(), *actor) != excluded.end();
}

bool Snapshot::IntersectBox(std::size_t index, const Eigen::Vector3d& origin,
                            const Eigen::Vector3d& direction, double max_t,
                            Candidate& best) const {
  const ResolvedBox& b = boxes_[index];
  std::optional<std::pair<double, double>> span;
  if (b.axis_aligned) {
    span = Slab(origin, direction, b.center - b.half_extents, b.center + b.half_extents);
  } else {
    const Eigen::Vector3d local_origin = b.rotation.transpose() * (origin - b.center);
    const Eigen::Vector3d local_dir = b.rotation.transpose() * direction;
    span = Slab(local_origin, local_dir, -b.half_extents, b.half_extents);
  }
  if (!span) return true;
  const auto [t_near, t_far] = *span;
  if (t_near <= 0.0 && t_far >= 0.0) return false;
  if (t_near > 0.0 && t_near <= max_t && Better(t_near, index + 1, best.t, best.order)) {
    best = {t_near, index + 1};
  }
  return true;
}

std::optional<RayHit> Snapshot::MakeHit(const Candidate& best,
                                        const Eigen::Vector3d& origin,
                                        const Eigen::Vector3d& direction) const {
  if (best.t == kInf) return std::nullopt;
  RayHit hit;
  hit.distance = best.t;
  hit.point = origin + best.t * direction;
  if (best.order == 0) {
    hit.point.z() = ground_->height;
    hit.label = ground_->LabelAt(hit.point.x(), hit.point.y());
  } else {
    const ResolvedBox& b = boxes_[best.order - 1];
    hit.label = b.label;
    hit.actor_index = b.actor_index;
  }
  return hit;
}

namespace {

void CheckRay(const Eigen::Vector3d& direction, double max_range) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw PreconditionError("ray direction must have unit norm");
  }
  if (!(max_range > 0.0)) throw PreconditionError("max_range must be positive");
}

}  // namespace

std::optional<RayHit> Snapshot::Cast(const Eigen::Vector3d& origin,
                                     const Eigen::Vector3d& direction,
                                     double max_range,
                                     std::span<const std::size_t> excluded) const {
  CheckRay(direction, max_range);
  Candidate best{kInf, 0};
  if (ground_) {
    if (origin.z() <= ground_->height) return std::nullopt;
    if (direction.z() < 0.0) {
      const double t = (ground_->height - origin.z()) / direction.z();
      if (t > 0.0 && t <= max_range) best = {t, 0};
    }
  }
  if (boxes_.empty()) return MakeHit(best, origin, direction);

  // Clip the horizontal projection of the ray to the bin grid.
  const double t_limit = std::min(max_range, best.t);
  const Eigen::Vector2d o = origin.head<2>() - bin_origin_;
  const Eigen::Vector2d d = direction.head<2>();
  const Eigen::Vector2d extent(bins_x_ * bin_size_, bins_y_ * bin_size_);
  double t0 = 0.0;
  double t1 = t_limit;
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(d[axis]) < kParallelEps) {
      if (o[axis] < 0.0 || o[axis] > extent[axis]) return MakeHit(best, origin, direction);
      continue;
    }
    double a = (0.0 - o[axis]) / d[axis];
    double b = (extent[axis] - o[axis]) / d[axis];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  if (t0 > t1) return MakeHit(best, origin, direction);

  // Amanatides-Woo traversal over the bins crossed by [t0, t1].
  const Eigen::Vector2d entry = o + t0 * d;
  int cell[2];
  int step[2];
  double t_max[2];
  double t_delta[2];
  const int bins[2] = {bins_x_, bins_y_};
  for (int axis = 0; axis < 2; ++axis) {
    cell[axis] = std::clamp(static_cast<int>(std::floor(entry[axis] / bin_size_)), 0,
                            bins[axis] - 1);
    if (d[axis] > kParallelEps) {
      step[axis] = 1;
      t_max[axis] = ((cell[axis] + 1) * bin_size_ - o[axis]) / d[axis];
      t_delta[axis] = bin_size_ / d[axis];
    } else if (d[axis] < -kParallelEps) {
      step[axis] = -1;
      t_max[axis] = (cell[axis] * bin_size_ - o[axis]) / d[axis];
      t_delta[axis] = -bin_size_ / d[axis];
    } else {
      step[axis] = 0;
      t_max[axis] = kInf;
      t_delta[axis] = kInf;
    }
  }
  const double max_t = t_limit;
  while (true) {
    const std::size_t bin = static_cast<std::size_t>(cell[0]) * bins_y_ + cell[1];
    for (std::uint32_t k = bin_offsets_[bin]; k < bin_offsets_[bin + 1]; ++k) {
      const std::uint32_t index = bin_items_[k];
      if (IsExcluded(index, excluded)) continue;
      if (!IntersectBox(index, origin, direction, max_t, best)) return std::nullopt;
    }
    const int axis = t_max[0] < t_max[1] ? 0 : 1;
    const double cell_exit = t_max[axis];
    if (best.t < cell_exit || cell_exit > t1) break;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= bins[axis]) break;
    t_max[axis] += t_delta[axis];
  }
  return MakeHit(best, origin, direction);
}

std::optional<RayHit> Snapshot::CastBruteForce(
    const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
    double max_range, std::span<const std::size_t> excluded) const {
  CheckRay(direction, max_range);
  Candidate best{kInf, 0};
  if (ground_) {
    if (origin.z() <= ground_->height) return std::nullopt;
    if (direction.z() < 0.0) {
      const double t = (ground_->height - origin.z()) / direction.z();
      if (t > 0.0 && t <= max_range) best = {t, 0};
    }
  }
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (IsExcluded(i, excluded)) continue;
    if (!IntersectBox(i, origin, direction, max_range, best)) return std::nullopt;
  }
  return MakeHit(best, origin, direction);
}

RawLabel Snapshot::LabelAt(const Eigen::Vector3d& point) const {
  double best_depth = kInf;
  std::size_t best_order = 0;
  RawLabel label = RawLabel::kFree;
  if (ground_ && point.z() < ground_->height) {
    best_depth = ground_->height - point.z();
    label = ground_->LabelAt(point.x(), point.y());
  }
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    const ResolvedBox& b = boxes_[i];
    if ((point.array() < b.aabb_min.array()).any() ||
        (point.array() > b.aabb_max.array()).any()) {
      continue;
    }
    const Eigen::Vector3d local = b.rotation.transpose() * (point - b.center);
    const Eigen::Vector3d slack = b.half_extents - local.cwiseAbs();
    if ((slack.array() < 0.0).any()) continue;
    const double depth = slack.minCoeff();
    if (Better(depth, i + 1, best_depth, best_order)) {
      best_depth = depth;
      best_order = i + 1;
      label = b.label;
    }
  }
  return label;
}

std::optional<RayHit> SemanticRaycast(const World& world, double t,
                                      const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& direction,
                                      double max_range,
                                      std::span<const std::size_t> excluded_actors) {
  CheckRay(direction, max_range);
  return Snapshot(world, t).Cast(origin, direction, max_range, excluded_actors);
}

RawLabel QueryLabel(const World& world, double t, const Eigen::Vector3d& point) {
  return Snapshot(world, t).LabelAt(point);
}

}  // namespace scenegt
