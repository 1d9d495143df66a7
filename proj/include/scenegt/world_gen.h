#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "scenegt/world.h"

namespace scenegt {

enum class TrafficPreset { kLow, kMedium, kHigh };

std::optional<TrafficPreset> TrafficPresetFromName(std::string_view name);
std::string_view TrafficPresetName(TrafficPreset preset);

struct TrafficDensity {
  int moving_vehicles;
  int parked_vehicles;
  int pedestrians;
};
TrafficDensity DensityFor(TrafficPreset preset);

struct GeneratorOptions {
  double duration_s = 10.0;
  double tick_s = 0.1;
  double ego_speed = 5.0;  // m/s along +x
};

// Straight two-lane road along x with parking strips, sidewalks, building
// rows, poles, trees and fences; the ego drives the +x lane. Deterministic in
// (seed, preset, options).
World GenerateWorld(std::uint64_t seed, TrafficPreset preset,
                    const GeneratorOptions& options = {});

}  // namespace scenegt
