#include "scenegt/io.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fmt/format.h"
#include "scenegt/errors.h"

namespace scenegt {
namespace {

using nlohmann::json;

constexpr char kCloudMagic[4] = {'C', 'S', 'C', '1'};
constexpr char kGridMagic[4] = {'C', 'S', 'G', '1'};
constexpr char kStackMagic[4] = {'C', 'S', 'T', '1'};

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve = 0) { bytes_.reserve(reserve); }
  void Magic(const char (&m)[4]) { bytes_.insert(bytes_.end(), m, m + 4); }
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Append(const std::vector<std::uint8_t>& v) {
    bytes_.insert(bytes_.end(), v.begin(), v.end());
  }
  Bytes Take() { return std::move(bytes_); }

 private:
  Bytes bytes_;
};

class ByteReader {
 public:
  ByteReader(const Bytes& bytes, const char* what) : bytes_(bytes), what_(what) {}

  void Magic(const char (&m)[4]) {
    Need(4);
    if (std::memcmp(bytes_.data() + pos_, m, 4) != 0) {
      throw FormatError(std::string(what_) + ": bad magic, expected " + std::string(m, 4),
                        pos_);
    }
    pos_ += 4;
  }
  std::uint8_t U8() {
    Need(1);
    return bytes_[pos_++];
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::vector<std::uint8_t> Block(std::size_t n) {
    Need(n);
    std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  void ExpectEnd() const {
    if (pos_ != bytes_.size()) {
      throw FormatError(std::string(what_) + ": trailing bytes", pos_);
    }
  }
  std::size_t pos() const { return pos_; }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string(what_) + ": truncated", bytes_.size());
    }
  }
  const Bytes& bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

void WriteSpec(ByteWriter& w, const GridSpec& spec) {
  for (int axis = 0; axis < 3; ++axis) {
    w.F64(spec.min[axis]);
    w.F64(spec.max[axis]);
  }
  for (auto n : spec.shape) w.U32(n);
}

GridSpec ReadSpec(ByteReader& r) {
  const std::size_t at = r.pos();
  GridSpec spec;
  for (int axis = 0; axis < 3; ++axis) {
    spec.min[axis] = r.F64();
    spec.max[axis] = r.F64();
  }
  for (auto& n : spec.shape) n = r.U32();
  try {
    spec.Validate();
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("invalid grid spec: ") + e.what(), at);
  }
  return spec;
}

}  // namespace

Bytes EncodeCloud(const PointCloud& cloud) {
  ByteWriter w(8 + 16 * cloud.points.size());
  w.Magic(kCloudMagic);
  w.U32(static_cast<std::uint32_t>(cloud.points.size()));
  for (const auto& p : cloud.points) {
    w.F32(p.position.x());
    w.F32(p.position.y());
    w.F32(p.position.z());
    w.U32(ToIndex(p.label));
  }
  return w.Take();
}

PointCloud DecodeCloud(const Bytes& bytes) {
  ByteReader r(bytes, "cloud");
  r.Magic(kCloudMagic);
  const std::uint32_t count = r.U32();
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    SemanticPoint p;
    p.position.x() = r.F32();
    p.position.y() = r.F32();
    p.position.z() = r.F32();
    const std::size_t at = r.pos();
    const std::uint32_t label = r.U32();
    if (label > 255) throw FormatError("cloud: label id out of range", at);
    p.label = static_cast<RawLabel>(label);
    cloud.points.push_back(p);
  }
  r.ExpectEnd();
  return cloud;
}

Bytes EncodeGrid(const LabelGrid& grid) {
  ByteWriter w(64 + 2 * grid.spec().voxel_count());
  w.Magic(kGridMagic);
  WriteSpec(w, grid.spec());
  w.Append(grid.raw_labels());
  w.Append(grid.raw_valid());
  return w.Take();
}

LabelGrid DecodeGrid(const Bytes& bytes) {
  ByteReader r(bytes, "grid");
  r.Magic(kGridMagic);
  const GridSpec spec = ReadSpec(r);
  const std::size_t n = spec.voxel_count();
  auto labels = r.Block(n);
  const std::size_t valid_at = r.pos();
  auto valid = r.Block(n);
  r.ExpectEnd();
  for (std::size_t i = 0; i < n; ++i) {
    if (valid[i] > 1) throw FormatError("grid: validity byte is not 0/1", valid_at + i);
    const bool known = labels[i] < kNumClasses;
    if ((valid[i] == 1 && !known) || (valid[i] == 0 && labels[i] != ToIndex(Label::kUnlabeled))) {
      throw FormatError("grid: label inconsistent with validity", 64 + i);
    }
  }
  return LabelGrid::FromRaw(spec, std::move(labels), std::move(valid));
}

Bytes EncodeStack(const OccupancyStack& stack) {
  const std::size_t n = stack.spec.voxel_count();
  const std::size_t layer_bytes = (n + 7) / 8;
  ByteWriter w(68 + layer_bytes * stack.grids.size());
  w.Magic(kStackMagic);
  w.U32(static_cast<std::uint32_t>(stack.grids.size()));
  WriteSpec(w, stack.spec);
  for (const auto& grid : stack.grids) {
    if (!(grid.spec() == stack.spec)) throw PreconditionError("stack layer spec mismatch");
    std::vector<std::uint8_t> packed(layer_bytes, 0);
    const auto& cells = grid.cells();
    for (std::size_t i = 0; i < n; ++i) {
      if (cells[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    w.Append(packed);
  }
  return w.Take();
}

OccupancyStack DecodeStack(const Bytes& bytes) {
  ByteReader r(bytes, "stack");
  r.Magic(kStackMagic);
  const std::uint32_t layers = r.U32();
  OccupancyStack stack;
  stack.spec = ReadSpec(r);
  const std::size_t n = stack.spec.voxel_count();
  const std::size_t layer_bytes = (n + 7) / 8;
  for (std::uint32_t t = 0; t < layers; ++t) {
    const std::size_t at = r.pos();
    const auto packed = r.Block(layer_bytes);
    OccupancyGrid grid(stack.spec);
    auto& cells = grid.mutable_cells();
    for (std::size_t i = 0; i < n; ++i) cells[i] = (packed[i / 8] >> (i % 8)) & 1u;
    if (n % 8 != 0 && (packed.back() >> (n % 8)) != 0) {
      throw FormatError("stack: nonzero padding bits", at + layer_bytes - 1);
    }
    stack.grids.push_back(std::move(grid));
  }
  r.ExpectEnd();
  return stack;
}

std::string FormatPoseLine(const Pose& pose) {
  const auto& R = pose.rotation();
  const auto& t = pose.translation();
  return fmt::format("{} {} {} {} {} {} {} {} {} {} {} {}", R(0, 0), R(0, 1), R(0, 2), t.x(),
                     R(1, 0), R(1, 1), R(1, 2), t.y(), R(2, 0), R(2, 1), R(2, 2), t.z());
}

Pose ParsePoseLine(const std::string& line, std::uint64_t line_number) {
  double v[12];
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (int i = 0; i < 12; ++i) {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    const auto [next, ec] = std::from_chars(p, end, v[i]);
    if (ec != std::errc()) throw FormatError("poses: expected 12 numbers per line", line_number);
    p = next;
  }
  while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (p != end) throw FormatError("poses: trailing characters", line_number);
  Eigen::Matrix3d R;
  R << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
  const Pose pose(R, Eigen::Vector3d(v[3], v[7], v[11]));
  if (!pose.IsValid(1e-6)) throw FormatError("poses: rotation is not orthonormal", line_number);
  return pose;
}

std::string EncodePoses(const std::vector<Pose>& poses) {
  std::string out;
  for (const auto& pose : poses) {
    out += FormatPoseLine(pose);
    out += '\n';
  }
  return out;
}

std::vector<Pose> DecodePoses(const std::string& text) {
  std::vector<Pose> poses;
  std::istringstream in(text);
  std::string line;
  std::uint64_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    poses.push_back(ParsePoseLine(line, number));
  }
  return poses;
}

Image RenderBev(const LabelGrid& grid) {
  const auto& spec = grid.spec();
  const int nx = static_cast<int>(spec.shape[0]);
  const int ny = static_cast<int>(spec.shape[1]);
  const int nz = static_cast<int>(spec.shape[2]);
  const auto& palette = ClassPalette();
  Image image{ny, nx, std::vector<Rgb>(static_cast<std::size_t>(nx) * ny, Rgb{0, 0, 0})};
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      bool any_valid = false;
      std::optional<Label> top;
      for (int iz = nz - 1; iz >= 0; --iz) {
        const std::size_t v = spec.Flat({ix, iy, iz});
        if (!grid.valid(v)) continue;
        any_valid = true;
        if (grid.label(v) != Label::kFree) {
          top = grid.label(v);
          break;
        }
      }
      Rgb color{0, 0, 0};
      if (top) {
        color = palette[ToIndex(*top)];
      } else if (any_valid) {
        color = palette[ToIndex(Label::kFree)];
      }
      image.pixels[static_cast<std::size_t>(nx - 1 - ix) * ny + (ny - 1 - iy)] = color;
    }
  }
  return image;
}

Bytes EncodePpm(const Image& image) {
  const std::string header = fmt::format("P6\n{} {}\n255\n", image.width, image.height);
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + image.pixels.size() * 3);
  for (const Rgb& px : image.pixels) {
    out.push_back(px.r);
    out.push_back(px.g);
    out.push_back(px.b);
  }
  return out;
}

Bytes ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  const Bytes bytes = ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  WriteFileBytes(path, Bytes(text.begin(), text.end()));
}

void WriteCloud(const std::filesystem::path& path, const PointCloud& cloud) {
  WriteFileBytes(path, EncodeCloud(cloud));
}
PointCloud ReadCloud(const std::filesystem::path& path) {
  return DecodeCloud(ReadFileBytes(path));
}
void WriteGrid(const std::filesystem::path& path, const LabelGrid& grid) {
  WriteFileBytes(path, EncodeGrid(grid));
}
LabelGrid ReadGrid(const std::filesystem::path& path) {
  return DecodeGrid(ReadFileBytes(path));
}
void WriteStack(const std::filesystem::path& path, const OccupancyStack& stack) {
  WriteFileBytes(path, EncodeStack(stack));
}
OccupancyStack ReadStack(const std::filesystem::path& path) {
  return DecodeStack(ReadFileBytes(path));
}
void WritePoses(const std::filesystem::path& path, const std::vector<Pose>& poses) {
  WriteTextFile(path, EncodePoses(poses));
}
std::vector<Pose> ReadPoses(const std::filesystem::path& path) {
  return DecodePoses(ReadTextFile(path));
}
void WriteBev(const std::filesystem::path& path, const LabelGrid& grid) {
  WriteFileBytes(path, EncodePpm(RenderBev(grid)));
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

json Vec(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d ToVec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector", 0);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Vector2d ToVec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("expected a 2-vector", 0);
  return {j[0].get<double>(), j[1].get<double>()};
}

RawLabel LabelFromJson(const json& j) {
  const auto name = j.get<std::string>();
  const auto label = RawLabelFromName(name);
  if (!label) throw FormatError("unknown label name '" + name + "'", 0);
  return *label;
}

json BoxToJson(const Box& box) {
  return {{"center", Vec(box.center)},
          {"half_extents", Vec(box.half_extents)},
          {"label", std::string(RawLabelName(box.label))}};
}

Box BoxFromJson(const json& j) {
  return {ToVec3(j.at("center")), ToVec3(j.at("half_extents")), LabelFromJson(j.at("label"))};
}

}  // namespace

json WorldToJson(const World& world) {
  json doc;
  doc["format_version"] = 1;
  doc["duration_s"] = world.duration();
  doc["tick_s"] = world.tick();
  if (const auto& g = world.ground()) {
    json regions = json::array();
    for (const auto& region : g->regions) {
      regions.push_back({{"min", {region.min.x(), region.min.y()}},
                         {"max", {region.max.x(), region.max.y()}},
                         {"label", std::string(RawLabelName(region.label))}});
    }
    doc["ground"] = {{"height", g->height},
                     {"default_label", std::string(RawLabelName(g->default_label))},
                     {"regions", regions}};
  } else {
    doc["ground"] = nullptr;
  }
  json statics = json::array();
  for (const auto& box : world.statics()) statics.push_back(BoxToJson(box));
  doc["statics"] = statics;
  json actors = json::array();
  for (const auto& actor : world.actors()) {
    json keys = json::array();
    for (const auto& k : actor.trajectory) {
      keys.push_back({{"t", k.t},
                      {"translation", Vec(k.translation)},
                      {"rotation_wxyz",
                       {k.rotation.w(), k.rotation.x(), k.rotation.y(), k.rotation.z()}}});
    }
    actors.push_back({{"box", BoxToJson(actor.box)}, {"is_ego", actor.is_ego}, {"keyframes", keys}});
  }
  doc["actors"] = actors;
  return doc;
}

World WorldFromJson(const json& doc) {
  try {
    if (doc.value("format_version", 1) != 1) {
      throw FormatError("world: unsupported format_version", 0);
    }
    std::optional<Ground> ground;
    if (doc.contains("ground") && !doc.at("ground").is_null()) {
      const json& g = doc.at("ground");
      Ground out;
      out.height = g.at("height").get<double>();
      out.default_label = LabelFromJson(g.at("default_label"));
      for (const auto& region : g.value("regions", json::array())) {
        out.regions.push_back({ToVec2(region.at("min")), ToVec2(region.at("max")),
                               LabelFromJson(region.at("label"))});
      }
      ground = out;
    }
    std::vector<Box> statics;
    for (const auto& box : doc.value("statics", json::array())) statics.push_back(BoxFromJson(box));
    std::vector<Actor> actors;
    for (const auto& a : doc.at("actors")) {
      Actor actor;
      actor.box = BoxFromJson(a.at("box"));
      actor.is_ego = a.value("is_ego", false);
      for (const auto& k : a.at("keyframes")) {
        Keyframe key;
        key.t = k.at("t").get<double>();
        key.translation = ToVec3(k.at("translation"));
        if (k.contains("rotation_wxyz")) {
          const auto& q = k.at("rotation_wxyz");
          key.rotation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                            q.at(2).get<double>(), q.at(3).get<double>());
        } else if (k.contains("yaw_deg")) {
          key.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(
              k.at("yaw_deg").get<double>() * M_PI / 180.0, Eigen::Vector3d::UnitZ()));
        }
        actor.trajectory.push_back(key);
      }
      actors.push_back(std::move(actor));
    }
    return World(std::move(statics), std::move(actors), std::move(ground),
                 doc.at("duration_s").get<double>(), doc.value("tick_s", 0.1));
  } catch (const json::exception& e) {
    throw FormatError(std::string("world: ") + e.what(), 0);
  }
}

void SaveWorld(const std::filesystem::path& path, const World& world) {
  WriteTextFile(path, DumpJson(WorldToJson(world)));
}

World LoadWorld(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("world: ") + e.what(), e.byte);
  }
  return WorldFromJson(doc);
}

json ManifestToJson(const SceneManifest& m) {
  json mounts = json::array();
  for (const auto& mount : m.rig.aux_mounts) mounts.push_back(Vec(mount.translation()));
  json doc;
  doc["format_version"] = m.format_version;
  doc["world"] = m.world_path;
  doc["seed"] = m.seed;
  doc["rig"] = {{"seed", m.rig.seed},
                {"bounds", {{"min", Vec(m.rig.bounds.min)}, {"max", Vec(m.rig.bounds.max)}}},
                {"ego_mount", Vec(m.rig.ego_mount.translation())},
                {"aux_mounts", mounts}};
  doc["lidar"] = {{"channels", m.lidar.channels},
                  {"vertical_fov_deg", {m.lidar.vertical_fov_min_deg, m.lidar.vertical_fov_max_deg}},
                  {"azimuth_steps", m.lidar.azimuth_steps},
                  {"max_range", m.lidar.max_range},
                  {"noise_bound", m.lidar.noise_bound},
                  {"rate_hz", m.lidar.rate_hz}};
  doc["grid"] = {{"min", Vec(m.grid.min)},
                 {"max", Vec(m.grid.max)},
                 {"shape", {m.grid.shape[0], m.grid.shape[1], m.grid.shape[2]}}};
  doc["free_step"] = m.free_step;
  doc["frame_count"] = m.frame_count;
  doc["tick_s"] = m.tick_s;
  doc["traffic_preset"] = std::string(TrafficPresetName(m.traffic_preset));
  return doc;
}

SceneManifest ManifestFromJson(const json& doc) {
  try {
    SceneManifest m;
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kManifestVersion) {
      throw FormatError("manifest: unsupported format_version " +
                            std::to_string(m.format_version),
                        0);
    }
    m.world_path = doc.at("world").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    const json& rig = doc.at("rig");
    m.rig.seed = rig.at("seed").get<std::uint64_t>();
    m.rig.bounds.min = ToVec3(rig.at("bounds").at("min"));
    m.rig.bounds.max = ToVec3(rig.at("bounds").at("max"));
    m.rig.bounds.Validate();
    m.rig.ego_mount = Pose::Translation(ToVec3(rig.at("ego_mount")));
    for (const auto& mount : rig.at("aux_mounts")) {
      const Eigen::Vector3d t = ToVec3(mount);
      if (!m.rig.bounds.Contains(t)) throw FormatError("manifest: aux mount outside rig bounds", 0);
      m.rig.aux_mounts.push_back(Pose::Translation(t));
    }
    const json& lidar = doc.at("lidar");
    m.lidar.channels = lidar.at("channels").get<int>();
    m.lidar.vertical_fov_min_deg = lidar.at("vertical_fov_deg").at(0).get<double>();
    m.lidar.vertical_fov_max_deg = lidar.at("vertical_fov_deg").at(1).get<double>();
    m.lidar.azimuth_steps = lidar.at("azimuth_steps").get<int>();
    m.lidar.max_range = lidar.at("max_range").get<double>();
    m.lidar.noise_bound = lidar.at("noise_bound").get<double>();
    m.lidar.rate_hz = lidar.value("rate_hz", 10.0);
    m.lidar.Validate();
    const json& grid = doc.at("grid");
    m.grid.min = ToVec3(grid.at("min"));
    m.grid.max = ToVec3(grid.at("max"));
    for (int i = 0; i < 3; ++i) m.grid.shape[i] = grid.at("shape").at(i).get<std::uint32_t>();
    m.grid.Validate();
    m.free_step = doc.at("free_step").get<double>();
    if (!(m.free_step > 0.0)) throw FormatError("manifest: free_step must be positive", 0);
    m.frame_count = doc.at("frame_count").get<std::int64_t>();
    m.tick_s = doc.at("tick_s").get<double>();
    const auto preset = TrafficPresetFromName(doc.value("traffic_preset", "medium"));
    if (!preset) throw FormatError("manifest: unknown traffic_preset", 0);
    m.traffic_preset = *preset;
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what(), 0);
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("manifest: ") + e.what(), 0);
  }
}

void SaveManifest(const std::filesystem::path& path, const SceneManifest& manifest) {
  WriteTextFile(path, DumpJson(ManifestToJson(manifest)));
}

SceneManifest LoadManifest(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest: ") + e.what(), e.byte);
  }
  return ManifestFromJson(doc);
}

std::filesystem::path ResolveWorldPath(const std::filesystem::path& manifest_path,
                                       const SceneManifest& manifest) {
  const std::filesystem::path world(manifest.world_path);
  if (world.is_absolute()) return world;
  return manifest_path.parent_path() / world;
}

std::string DumpJson(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace scenegt
