#include "scenegt/world_gen.h"

#include <cmath>
#include <numbers>

#include "scenegt/random.h"

namespace scenegt {
namespace {

constexpr double kLaneY = 1.75;
constexpr double kParkingY = 4.4;
constexpr double kRoadHalfWidth = 5.5;
constexpr double kSidewalkOuter = 8.0;
constexpr double kSidewalkHeight = 0.15;
constexpr double kBuildingSetback = 9.0;
constexpr double kMargin = 70.0;

const Eigen::Vector3d kCarHalf(2.3, 0.95, 0.75);
const Eigen::Vector3d kPedestrianHalf(0.3, 0.3, 0.9);

// Sequential uniform draws from a counter-based stream.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  double Uniform(double lo, double hi) {
    const auto block = rng_({static_cast<std::uint32_t>(counter_),
                             static_cast<std::uint32_t>(counter_ >> 32), 0x57524c44u, 0});
    ++counter_;
    return ToUniform(block[0], lo, hi);
  }
  bool Chance(double p) { return Uniform(0.0, 1.0) < p; }

 private:
  Philox4x32 rng_;
  std::uint64_t counter_ = 0;
};

Eigen::Quaterniond Yaw(double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
}

Actor MakeActor(const Eigen::Vector3d& half, RawLabel label,
                std::vector<Keyframe> keys, bool is_ego = false) {
  Actor actor;
  actor.box.center = Eigen::Vector3d(0.0, 0.0, half.z());
  actor.box.half_extents = half;
  actor.box.label = label;
  actor.trajectory = std::move(keys);
  actor.is_ego = is_ego;
  return actor;
}

Box MakeBox(double x0, double x1, double y0, double y1, double z0, double z1,
            RawLabel label) {
  Box box;
  box.center = Eigen::Vector3d((x0 + x1) / 2, (y0 + y1) / 2, (z0 + z1) / 2);
  box.half_extents = Eigen::Vector3d((x1 - x0) / 2, (y1 - y0) / 2, (z1 - z0) / 2);
  box.label = label;
  return box;
}

}  // namespace

std::optional<TrafficPreset> TrafficPresetFromName(std::string_view name) {
  if (name == "low") return TrafficPreset::kLow;
  if (name == "medium") return TrafficPreset::kMedium;
  if (name == "high") return TrafficPreset::kHigh;
  return std::nullopt;
}

std::string_view TrafficPresetName(TrafficPreset preset) {
  switch (preset) {
    case TrafficPreset::kLow: return "low";
    case TrafficPreset::kMedium: return "medium";
    case TrafficPreset::kHigh: return "high";
  }
  return "medium";
}

TrafficDensity DensityFor(TrafficPreset preset) {
  switch (preset) {
    case TrafficPreset::kLow: return {2, 4, 4};
    case TrafficPreset::kMedium: return {6, 8, 10};
    case TrafficPreset::kHigh: return {12, 14, 20};
  }
  return {6, 8, 10};
}

World GenerateWorld(std::uint64_t seed, TrafficPreset preset,
                    const GeneratorOptions& options) {
  Stream rng(seed);
  const double duration = options.duration_s;
  const double ego_end = options.ego_speed * duration;
  const double x_lo = -kMargin;
  const double x_hi = ego_end + kMargin;

  Ground ground;
  ground.height = 0.0;
  ground.default_label = RawLabel::kTerrain;
  ground.regions.push_back({{-1e4, -kRoadHalfWidth}, {1e4, kRoadHalfWidth}, RawLabel::kRoad});
  ground.regions.push_back({{-1e4, -30.0}, {1e4, 30.0}, RawLabel::kGround});

  std::vector<Box> statics;
  for (const double side : {-1.0, 1.0}) {
    const double y_in = side * kRoadHalfWidth;
    const double y_out = side * kSidewalkOuter;
    statics.push_back(MakeBox(x_lo, x_hi, std::min(y_in, y_out), std::max(y_in, y_out),
                              0.0, kSidewalkHeight, RawLabel::kSidewalk));
    // Building row with fenced gaps.
    double x = x_lo + rng.Uniform(0.0, 6.0);
    while (x < x_hi) {
      const double width = rng.Uniform(8.0, 20.0);
      const double depth = rng.Uniform(8.0, 15.0);
      const double height = rng.Uniform(6.0, 25.0);
      const double y0 = side * kBuildingSetback;
      const double y1 = side * (kBuildingSetback + depth);
      statics.push_back(MakeBox(x, std::min(x + width, x_hi), std::min(y0, y1),
                                std::max(y0, y1), 0.0, height, RawLabel::kBuilding));
      x += width;
      const double gap = rng.Uniform(1.0, 6.0);
      if (rng.Chance(0.5) && x < x_hi) {
        const double fy = side * (kBuildingSetback + 0.1);
        statics.push_back(MakeBox(x, std::min(x + gap, x_hi), std::min(fy, fy - side * 0.2),
                                  std::max(fy, fy - side * 0.2), 0.0, 1.2,
                                  rng.Chance(0.5) ? RawLabel::kFence : RawLabel::kWall));
      }
      x += gap;
    }
    // Poles, signs and trees along the sidewalk.
    x = x_lo + rng.Uniform(2.0, 10.0);
    while (x < x_hi) {
      const double py = side * 6.0;
      const double kind = rng.Uniform(0.0, 1.0);
      if (kind < 0.45) {
        statics.push_back(MakeBox(x - 0.12, x + 0.12, py - 0.12, py + 0.12,
                                  kSidewalkHeight, 5.0, RawLabel::kPole));
      } else if (kind < 0.6) {
        statics.push_back(MakeBox(x - 0.08, x + 0.08, py - 0.08, py + 0.08,
                                  kSidewalkHeight, 2.2, RawLabel::kPole));
        statics.push_back(MakeBox(x - 0.05, x + 0.05, py - 0.4, py + 0.4, 2.2, 3.0,
                                  RawLabel::kTrafficSign));
      } else {
        const double ty = side * 7.1;
        const double r = rng.Uniform(1.0, 2.0);
        statics.push_back(MakeBox(x - 0.2, x + 0.2, ty - 0.2, ty + 0.2,
                                  kSidewalkHeight, 2.5, RawLabel::kVegetation));
        statics.push_back(MakeBox(x - r, x + r, ty - r * 0.6, ty + r * 0.6, 2.5,
                                  2.5 + 2 * r, RawLabel::kVegetation));
      }
      x += rng.Uniform(12.0, 25.0);
    }
  }

  std::vector<Actor> actors;
  actors.push_back(MakeActor(kCarHalf, RawLabel::kVehicles,
                             {Keyframe{0.0, {0.0, -kLaneY, 0.0}, Yaw(0.0)},
                              Keyframe{duration, {ego_end, -kLaneY, 0.0}, Yaw(0.0)}},
                             true));

  const TrafficDensity density = DensityFor(preset);
  for (int i = 0; i < density.moving_vehicles; ++i) {
    const bool oncoming = rng.Chance(0.6);
    double speed;
    double x0;
    if (oncoming) {
      speed = -rng.Uniform(4.0, 12.0);
      x0 = rng.Uniform(x_lo + 10.0, x_hi + 40.0);
    } else {
      // Same-lane traffic starts ahead of the ego and pulls away from it.
      speed = options.ego_speed + rng.Uniform(1.0, 6.0);
      x0 = rng.Uniform(10.0, x_hi - 10.0);
    }
    const double y = oncoming ? kLaneY : -kLaneY;
    const double yaw = oncoming ? std::numbers::pi : 0.0;
    actors.push_back(MakeActor(kCarHalf, RawLabel::kVehicles,
                               {Keyframe{0.0, {x0, y, 0.0}, Yaw(yaw)},
                                Keyframe{duration, {x0 + speed * duration, y, 0.0}, Yaw(yaw)}}));
  }
  for (int i = 0; i < density.parked_vehicles; ++i) {
    const double y = rng.Chance(0.5) ? kParkingY : -kParkingY;
    const double x = rng.Uniform(x_lo + 5.0, x_hi - 5.0);
    actors.push_back(MakeActor(kCarHalf, RawLabel::kVehicles,
                               {Keyframe{0.0, {x, y, 0.0}, Yaw(0.0)}}));
  }
  for (int i = 0; i < density.pedestrians; ++i) {
    const double y = (rng.Chance(0.5) ? 1.0 : -1.0) * rng.Uniform(6.4, 7.6);
    const double x0 = rng.Uniform(x_lo + 5.0, x_hi - 5.0);
    const double speed = (rng.Chance(0.5) ? 1.0 : -1.0) * rng.Uniform(0.8, 1.6);
    const double yaw = speed > 0 ? 0.0 : std::numbers::pi;
    actors.push_back(MakeActor(
        kPedestrianHalf, RawLabel::kPedestrian,
        {Keyframe{0.0, {x0, y, kSidewalkHeight}, Yaw(yaw)},
         Keyframe{duration, {x0 + speed * duration, y, kSidewalkHeight}, Yaw(yaw)}}));
  }
  return World(std::move(statics), std::move(actors), std::move(ground), duration,
               options.tick_s);
}

}  // namespace scenegt
