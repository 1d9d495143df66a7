#include <cmath>
#include <numbers>

#include "doctest.h"
#include "scenegt/errors.h"
#include "scenegt/io.h"
#include "scenegt/random.h"
#include "scenegt/world.h"
#include "scenegt/world_gen.h"

using namespace scenegt;
using Eigen::Vector3d;

namespace {

Box MakeBox(Vector3d c, Vector3d h, RawLabel label) { return Box{c, h, label}; }

Actor Parked(Vector3d at, bool ego = false) {
  Actor a;
  a.box = MakeBox({0, 0, 0.75}, {2.3, 0.95, 0.75}, RawLabel::kVehicles);
  a.trajectory = {Keyframe{0.0, at, Eigen::Quaterniond::Identity()}};
  a.is_ego = ego;
  return a;
}

World OneBox() {
  return World({MakeBox({10, 0, 0}, {1, 1, 1}, RawLabel::kBuilding)},
               {Parked({-100, -100, 0}, true)}, std::nullopt, 10.0, 0.1);
}

}  // namespace

TEST_CASE("actor pose interpolation") {
  Actor a = Parked({3, 4, 0});
  CHECK((ActorPoseAt(a, 5.0).translation() - Vector3d(3, 4, 0)).norm() < 1e-12);
  a.trajectory = {Keyframe{0, {0, 0, 0}, Eigen::Quaterniond::Identity()},
                  Keyframe{10, {20, 0, 0}, Eigen::Quaterniond::Identity()}};
  CHECK(ActorPoseAt(a, 5.0).translation().x() == doctest::Approx(10.0));
  CHECK(ActorPoseAt(a, 2.5).translation().x() == doctest::Approx(5.0));
  CHECK(ActorPoseAt(a, -1.0).translation().x() == doctest::Approx(0.0));
  CHECK(ActorPoseAt(a, 11.0).translation().x() == doctest::Approx(20.0));

  // Slerp through a quarter turn.
  a.trajectory[1].rotation = Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi / 2, Vector3d::UnitZ()));
  const Pose mid = ActorPoseAt(a, 5.0);
  const Vector3d fwd = mid.rotation() * Vector3d::UnitX();
  CHECK(std::atan2(fwd.y(), fwd.x()) == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("raycast examples") {
  const World empty = World::Empty();
  const std::size_t ego[] = {0};
  CHECK_FALSE(SemanticRaycast(empty, 0.0, {0, 0, 5}, {1, 0, 0}, 50, ego).has_value());
  CHECK_FALSE(SemanticRaycast(empty, 0.0, {3, 1, 5}, {0, 0, -1}, 50).has_value());

  const World world = OneBox();
  const auto hit = SemanticRaycast(world, 0.0, {0, 0, 0}, {1, 0, 0}, 50);
  REQUIRE(hit.has_value());
  CHECK((hit->point - Vector3d(9, 0, 0)).norm() < 1e-12);
  CHECK(hit->distance == doctest::Approx(9.0));
  CHECK(hit->label == RawLabel::kBuilding);
  CHECK_FALSE(SemanticRaycast(world, 0.0, {0, 0, 0}, {1, 0, 0}, 5).has_value());

  CHECK_THROWS_AS(SemanticRaycast(world, 0.0, {0, 0, 0}, {2, 0, 0}, 50), PreconditionError);
  CHECK_THROWS_AS(SemanticRaycast(world, 0.0, {0, 0, 0}, {1, 0, 0}, 0), PreconditionError);
}

TEST_CASE("ground hits take the region label") {
  Ground g;
  g.height = 0.0;
  g.default_label = RawLabel::kTerrain;
  g.regions.push_back({{-100, -2}, {100, 2}, RawLabel::kRoad});
  const World world({}, {Parked({-500, 0, 0}, true)}, g, 1.0, 0.1);
  const Vector3d dir = Vector3d(1, 0, -1).normalized();
  const auto road = SemanticRaycast(world, 0.0, {0, 0, 1}, dir, 50);
  REQUIRE(road);
  CHECK(road->label == RawLabel::kRoad);
  CHECK(road->point.z() == doctest::Approx(0.0));
  const auto terrain = SemanticRaycast(world, 0.0, {0, 5, 1}, dir, 50);
  REQUIRE(terrain);
  CHECK(terrain->label == RawLabel::kTerrain);
  // Looking up never hits the plane; starting below it is blocked.
  CHECK_FALSE(SemanticRaycast(world, 0.0, {0, 0, 1}, {0, 0, 1}, 50));
  CHECK_FALSE(SemanticRaycast(world, 0.0, {0, 0, -1}, {1, 0, 0}, 50));
  CHECK(g.LabelAt(0, 2.0) == RawLabel::kTerrain);
  CHECK(g.LabelAt(0, -2.0) == RawLabel::kRoad);
}

TEST_CASE("excluded actors are transparent") {
  const World world({}, {Parked({0, 0, 0}, true), Parked({10, 0, 0})}, std::nullopt, 1.0, 0.1);
  const std::size_t other[] = {1};
  const auto hit = SemanticRaycast(world, 0.0, {-10, 0, 0.5}, {1, 0, 0}, 50);
  REQUIRE(hit);
  CHECK(hit->actor_index == 0);
  CHECK(hit->point.x() == doctest::Approx(-2.3));
  const std::size_t ego[] = {0};
  const auto past = SemanticRaycast(world, 0.0, {-10, 0, 0.5}, {1, 0, 0}, 50, ego);
  REQUIRE(past);
  CHECK(past->actor_index == 1);
  CHECK(past->point.x() == doctest::Approx(7.7));
  CHECK_FALSE(SemanticRaycast(world, 0.0, {-10, 0, 0.5}, {1, 0, 0}, 50, std::vector<std::size_t>{0, 1}));
  (void)other;
}

TEST_CASE("query label") {
  Actor mover = Parked({0, 0, 0});
  mover.trajectory = {Keyframe{0, {20, 0, 0}, Eigen::Quaterniond::Identity()},
                      Keyframe{10, {-10, 0, 0}, Eigen::Quaterniond::Identity()}};
  const World world({MakeBox({0, 20, 5}, {4, 4, 5}, RawLabel::kBuilding)},
                    {Parked({0, -50, 0}, true), mover}, std::nullopt, 10.0, 0.1);
  CHECK(QueryLabel(world, 0.0, {1, 21, 3}) == RawLabel::kBuilding);
  CHECK(QueryLabel(world, 0.0, {0, 0, 10}) == RawLabel::kFree);
  // Mover is at x = 11 at t = 3.
  CHECK(QueryLabel(world, 3.0, {11, 0, 0.5}) == RawLabel::kVehicles);
  CHECK(QueryLabel(world, 0.0, {11, 0, 0.5}) == RawLabel::kFree);
}

TEST_CASE("dda cast agrees with brute force") {
  const World world = GenerateWorld(3, TrafficPreset::kHigh);
  const Philox4x32 rng(11);
  for (const double t : {0.0, 3.3, 9.9}) {
    const Snapshot snap(world, t);
    const std::size_t ego[] = {world.ego_index()};
    int hits = 0;
    for (std::uint32_t i = 0; i < 4000; ++i) {
      const auto a = rng({i, static_cast<std::uint32_t>(t * 10), 1, 0});
      const auto b = rng({i, static_cast<std::uint32_t>(t * 10), 2, 0});
      const Vector3d origin(ToUniform(a[0], -40, 90), ToUniform(a[1], -30, 30), ToUniform(a[2], 0.2, 8));
      Vector3d dir(ToUniform(b[0], -1, 1), ToUniform(b[1], -1, 1), ToUniform(b[2], -1, 0.3));
      if (dir.norm() < 1e-3) continue;
      dir.normalize();
      const double range = ToUniform(a[3], 1, 80);
      const auto fast = snap.Cast(origin, dir, range, ego);
      const auto slow = snap.CastBruteForce(origin, dir, range, ego);
      REQUIRE(fast.has_value() == slow.has_value());
      if (!fast) continue;
      ++hits;
      CHECK(fast->distance == doctest::Approx(slow->distance).epsilon(1e-12));
      CHECK(fast->label == slow->label);
      CHECK(fast->actor_index == slow->actor_index);
    }
    CHECK(hits > 1000);
  }
}

TEST_CASE("world validation") {
  CHECK_THROWS_AS(World({}, {Parked({0, 0, 0})}, std::nullopt, 1.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(World({}, {Parked({0, 0, 0}, true), Parked({1, 0, 0}, true)}, std::nullopt, 1.0, 0.1),
                  PreconditionError);
  CHECK_THROWS_AS(World({MakeBox({0, 0, 0}, {1, 0, 1}, RawLabel::kWall)}, {Parked({0, 0, 0}, true)},
                        std::nullopt, 1.0, 0.1),
                  PreconditionError);
  CHECK_THROWS_AS(World({}, {Parked({0, 0, 0}, true)}, std::nullopt, 1.05, 0.1), PreconditionError);
  Actor bad = Parked({0, 0, 0}, true);
  bad.trajectory.push_back(bad.trajectory.front());
  CHECK_THROWS_AS(World({}, {bad}, std::nullopt, 1.0, 0.1), PreconditionError);
  CHECK(World::Empty(10.0, 0.1).frame_count() == 100);
}

TEST_CASE("generator is deterministic and density follows the preset") {
  const World a = GenerateWorld(5, TrafficPreset::kMedium);
  const World b = GenerateWorld(5, TrafficPreset::kMedium);
  CHECK(DumpJson(WorldToJson(a)) == DumpJson(WorldToJson(b)));
  CHECK(DumpJson(WorldToJson(a)) != DumpJson(WorldToJson(GenerateWorld(6, TrafficPreset::kMedium))));
  CHECK(GenerateWorld(5, TrafficPreset::kHigh).actors().size() >
        GenerateWorld(5, TrafficPreset::kLow).actors().size());
  CHECK(a.ego().is_ego);
  CHECK_FALSE(TrafficPresetFromName("rush-hour").has_value());
  CHECK(TrafficPresetName(*TrafficPresetFromName("high")) == "high");
}
