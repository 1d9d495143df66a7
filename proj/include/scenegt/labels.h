#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace scenegt {

// Raw simulator classes. Id 0 is reserved for unlabeled returns; kFree is an
// out-of-palette sentinel used for free-space observations and open air.
enum class RawLabel : std::uint8_t {
  kUnlabeled = 0,
  kOther = 1,
  kSky = 2,
  kBridge = 3,
  kRailtrack = 4,
  kStatic = 5,
  kDynamic = 6,
  kWater = 7,
  kFence = 8,
  kWall = 9,
  kGuardrail = 10,
  kPole = 11,
  kTrafficLight = 12,
  kTrafficSign = 13,
  kRoad = 14,
  kRoadline = 15,
  kGround = 16,
  kTerrain = 17,
  kBuilding = 18,
  kPedestrian = 19,
  kSidewalk = 20,
  kVegetation = 21,
  kVehicles = 22,
  kFree = 255,
};

inline constexpr std::size_t kNumRawLabels = 23;

// Evaluation classes; the order is also the column order of reports.
enum class Label : std::uint8_t {
  kFree = 0,
  kBuilding = 1,
  kBarrier = 2,
  kOther = 3,
  kPedestrian = 4,
  kPole = 5,
  kRoad = 6,
  kGround = 7,
  kSidewalk = 8,
  kVegetation = 9,
  kVehicles = 10,
  kUnlabeled = 255,
};

inline constexpr std::size_t kNumClasses = 11;

constexpr std::uint8_t ToIndex(Label label) {
  return static_cast<std::uint8_t>(label);
}
constexpr std::uint8_t ToIndex(RawLabel label) {
  return static_cast<std::uint8_t>(label);
}

// True for ids inside the 23-entry palette (Unlabeled included).
bool IsPaletteId(std::uint8_t id);

std::string_view RawLabelName(RawLabel label);
std::optional<RawLabel> RawLabelFromName(std::string_view name);

std::string_view LabelName(Label label);
std::optional<Label> LabelFromName(std::string_view name);

// Collapses raw classes onto the 11 evaluation classes. Free maps to Free and
// Unlabeled (or any id outside the palette) maps to Label::kUnlabeled.
Label Remap(RawLabel raw);

constexpr bool IsDynamic(Label label) {
  return label == Label::kPedestrian || label == Label::kVehicles;
}

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Display colors for the evaluation classes, indexed by Label id.
const std::array<Rgb, kNumClasses>& ClassPalette();

}  // namespace scenegt
