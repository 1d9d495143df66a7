#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenegt/grid.h"
#include "scenegt/labels.h"
#include "scenegt/lidar.h"
#include "scenegt/pose.h"
#include "scenegt/rig.h"
#include "scenegt/world.h"
#include "scenegt/world_gen.h"

namespace scenegt {

using Bytes = std::vector<std::uint8_t>;

// All binary formats are little-endian; layouts are documented in
// docs/formats.md. Decoders throw FormatError with the failing byte offset.

// "CSC1", u32 count, count x (3 x f32 position, u32 raw label).
Bytes EncodeCloud(const PointCloud& cloud);
// Only the points are stored; pose, time and sensor id live elsewhere.
PointCloud DecodeCloud(const Bytes& bytes);

// "CSG1", 6 x f64 extents (xmin xmax ymin ymax zmin zmax), 3 x u32 shape,
// N x u8 labels, N x u8 validity, both in x-major order.
Bytes EncodeGrid(const LabelGrid& grid);
LabelGrid DecodeGrid(const Bytes& bytes);

// "CST1", u32 T, grid spec as in CSG1, then T layers, each the (Z, X, Y)
// occupancy bits packed LSB-first and padded to a whole byte. Layer 0 is the
// most recent frame. Poses are not stored.
Bytes EncodeStack(const OccupancyStack& stack);
OccupancyStack DecodeStack(const Bytes& bytes);

// One line per pose: row-major 3x4 [R|t], 12 numbers.
std::string FormatPoseLine(const Pose& pose);
Pose ParsePoseLine(const std::string& line, std::uint64_t line_number = 0);
std::string EncodePoses(const std::vector<Pose>& poses);
std::vector<Pose> DecodePoses(const std::string& text);

// Top-down render: one pixel per (x, y) column. Row 0 is the largest x
// (forward up), column 0 the largest y (left on the left). A column shows the
// color of its highest valid non-Free voxel, the Free color when every valid
// voxel is Free, and black when no voxel in it is valid.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major
  const Rgb& at(int row, int col) const { return pixels[row * width + col]; }
};
Image RenderBev(const LabelGrid& grid);
Bytes EncodePpm(const Image& image);

Bytes ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, const Bytes& bytes);
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

void WriteCloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud ReadCloud(const std::filesystem::path& path);
void WriteGrid(const std::filesystem::path& path, const LabelGrid& grid);
LabelGrid ReadGrid(const std::filesystem::path& path);
void WriteStack(const std::filesystem::path& path, const OccupancyStack& stack);
OccupancyStack ReadStack(const std::filesystem::path& path);
void WritePoses(const std::filesystem::path& path, const std::vector<Pose>& poses);
std::vector<Pose> ReadPoses(const std::filesystem::path& path);
void WriteBev(const std::filesystem::path& path, const LabelGrid& grid);

// World description documents.
nlohmann::json WorldToJson(const World& world);
World WorldFromJson(const nlohmann::json& doc);
void SaveWorld(const std::filesystem::path& path, const World& world);
World LoadWorld(const std::filesystem::path& path);

inline constexpr int kManifestVersion = 1;

// Everything needed to regenerate one scene.
struct SceneManifest {
  int format_version = kManifestVersion;
  std::string world_path;  // relative paths resolve against the manifest
  std::uint64_t seed = 0;  // sensor noise
  Rig rig;
  LidarSpec lidar;
  GridSpec grid;
  double free_step = 1.5;
  std::int64_t frame_count = 100;
  double tick_s = 0.1;
  TrafficPreset traffic_preset = TrafficPreset::kMedium;
};

nlohmann::json ManifestToJson(const SceneManifest& manifest);
SceneManifest ManifestFromJson(const nlohmann::json& doc);
void SaveManifest(const std::filesystem::path& path, const SceneManifest& manifest);
SceneManifest LoadManifest(const std::filesystem::path& path);
// The manifest's world path resolved against the manifest location.
std::filesystem::path ResolveWorldPath(const std::filesystem::path& manifest_path,
                                       const SceneManifest& manifest);

std::string DumpJson(const nlohmann::json& doc);

}  // namespace scenegt
