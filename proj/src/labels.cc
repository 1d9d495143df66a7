#include "scenegt/labels.h"

namespace scenegt {
namespace {

constexpr std::array<std::string_view, kNumRawLabels> kRawNames = {
    "Unlabeled",    "Other",        "Sky",      "Bridge",   "Railtrack",
    "Static",       "Dynamic",      "Water",    "Fence",    "Wall",
    "Guardrail",    "Pole",         "TrafficLight", "TrafficSign", "Road",
    "Roadline",     "Ground",       "Terrain",  "Building", "Pedestrian",
    "Sidewalk",     "Vegetation",   "Vehicles",
};

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Free", "Building", "Barrier",  "Other",      "Pedestrian", "Pole",
    "Road", "Ground",   "Sidewalk", "Vegetation", "Vehicles",
};

// Indexed by raw id.
constexpr std::array<Label, kNumRawLabels> kRemapTable = {
    Label::kUnlabeled,   // Unlabeled
    Label::kOther,       // Other
    Label::kOther,       // Sky
    Label::kOther,       // Bridge
    Label::kOther,       // Railtrack
    Label::kOther,       // Static
    Label::kOther,       // Dynamic
    Label::kOther,       // Water
    Label::kBarrier,     // Fence
    Label::kBarrier,     // Wall
    Label::kBarrier,     // Guardrail
    Label::kPole,        // Pole
    Label::kPole,        // TrafficLight
    Label::kPole,        // TrafficSign
    Label::kRoad,        // Road
    Label::kRoad,        // Roadline
    Label::kGround,      // Ground
    Label::kGround,      // Terrain
    Label::kBuilding,    // Building
    Label::kPedestrian,  // Pedestrian
    Label::kSidewalk,    // Sidewalk
    Label::kVegetation,  // Vegetation
    Label::kVehicles,    // Vehicles
};

constexpr std::array<Rgb, kNumClasses> kPalette = {{
    {255, 255, 255},  // Free
    {70, 70, 70},     // Building
    {190, 153, 153},  // Barrier
    {110, 190, 160},  // Other
    {220, 20, 60},    // Pedestrian
    {153, 153, 153},  // Pole
    {128, 64, 128},   // Road
    {81, 0, 81},      // Ground
    {244, 35, 232},   // Sidewalk
    {107, 142, 35},   // Vegetation
    {0, 0, 142},      // Vehicles
}};

}  // namespace

bool IsPaletteId(std::uint8_t id) { return id < kNumRawLabels; }

std::string_view RawLabelName(RawLabel label) {
  if (label == RawLabel::kFree) return "Free";
  const auto id = ToIndex(label);
  return IsPaletteId(id) ? kRawNames[id] : std::string_view("Invalid");
}

std::optional<RawLabel> RawLabelFromName(std::string_view name) {
  for (std::size_t i = 0; i < kRawNames.size(); ++i) {
    if (kRawNames[i] == name) return static_cast<RawLabel>(i);
  }
  return std::nullopt;
}

std::string_view LabelName(Label label) {
  const auto id = ToIndex(label);
  return id < kNumClasses ? kClassNames[id] : std::string_view("Unlabeled");
}

std::optional<Label> LabelFromName(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<Label>(i);
  }
  if (name == "Unlabeled") return Label::kUnlabeled;
  return std::nullopt;
}

Label Remap(RawLabel raw) {
  if (raw == RawLabel::kFree) return Label::kFree;
  const auto id = ToIndex(raw);
  return IsPaletteId(id) ? kRemapTable[id] : Label::kUnlabeled;
}

const std::array<Rgb, kNumClasses>& ClassPalette() { return kPalette; }

}  // namespace scenegt
