#include "scenegt/cli.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <regex>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "fmt/ostream.h"
#include "scenegt/errors.h"
#include "scenegt/ground_truth.h"
#include "scenegt/io.h"
#include "scenegt/metrics.h"
#include "scenegt/world_gen.h"

namespace scenegt::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FrameRange {
  std::int64_t first = 0;
  std::int64_t last = -1;  // inclusive; last < first means empty
  bool empty() const { return last < first; }
};

FrameRange ParseFrames(const std::string& text, std::int64_t frame_count) {
  if (text.empty()) return {0, frame_count - 1};
  static const std::regex kPattern(R"(^(\d+)\.\.(\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, kPattern)) {
    throw UsageError("--frames expects A..B, got '" + text + "'");
  }
  FrameRange range{std::stoll(m[1]), std::stoll(m[2])};
  if (!range.empty() && range.last >= frame_count) {
    throw UsageError(fmt::format("--frames {} exceeds the scene's {} frames", text, frame_count));
  }
  return range;
}

std::string CloudName(std::int64_t frame, std::size_t sensor) {
  return fmt::format("frame_{:06d}_s{:02d}.bin", frame, sensor);
}
std::string GridName(std::int64_t frame) { return fmt::format("frame_{:06d}.grid", frame); }

// Key=value log lines.
class Logger {
 public:
  explicit Logger(std::ostream& os) : os_(os) {}
  template <typename... Args>
  void operator()(fmt::format_string<Args...> f, Args&&... args) {
    os_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

 private:
  std::ostream& os_;
};

struct Common {
  std::string manifest;
  std::string out;
  std::string frames;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> r;
  std::optional<int> n_aux;
};

// A loaded manifest with command-line overrides applied.
struct Scene {
  SceneManifest manifest;
  World world;
  FrameRange frames;
  double r;
  int threads;

  double time_of(std::int64_t frame) const { return frame * manifest.tick_s; }
};

Scene LoadScene(const Common& c) {
  if (c.threads < 1) throw UsageError("--threads must be >= 1");
  const fs::path manifest_path(c.manifest);
  SceneManifest m = LoadManifest(manifest_path);
  const int n_aux = c.n_aux.value_or(static_cast<int>(m.rig.aux_mounts.size()));
  if (n_aux < 0) throw UsageError("--n-aux must be >= 0");
  if (c.seed) {
    m.seed = *c.seed;
    m.rig.seed = *c.seed;
  }
  if (c.seed || c.n_aux) {
    const Pose ego_mount = m.rig.ego_mount;
    m.rig = SampleRig(m.rig.bounds, n_aux, m.rig.seed);
    m.rig.ego_mount = ego_mount;
  }
  if (c.r) {
    if (!(*c.r > 0.0)) throw UsageError("--r must be positive");
    m.free_step = *c.r;
  }
  World world = LoadWorld(ResolveWorldPath(manifest_path, m));
  const FrameRange frames = ParseFrames(c.frames, m.frame_count);
  return Scene{m, std::move(world), frames, m.free_step, c.threads};
}

void AddCommon(CLI::App* app, Common& c, bool needs_manifest = true) {
  auto* opt = app->add_option("--manifest", c.manifest, "scene manifest (JSON)");
  if (needs_manifest) opt->required();
  app->add_option("--out", c.out, "output directory")->required();
  app->add_option("--frames", c.frames, "inclusive frame range A..B");
  app->add_option("--threads", c.threads, "worker threads");
  app->add_option("--seed", c.seed, "override noise and rig seed");
  app->add_option("--r", c.r, "free-space step in meters");
  app->add_option("--n-aux", c.n_aux, "override the number of auxiliary sensors");
}

// Ego clouds and poses previously written by `simulate`.
struct EgoHistory {
  std::map<std::int64_t, Pose> poses;
  fs::path cloud_dir;

  bool Has(std::int64_t frame) const {
    return poses.count(frame) && fs::exists(cloud_dir / CloudName(frame, 0));
  }
  PointCloud Load(std::int64_t frame, double t) const {
    PointCloud cloud = ReadCloud(cloud_dir / CloudName(frame, 0));
    cloud.sensor_pose = poses.at(frame);
    cloud.t = t;
    cloud.sensor_id = 0;
    return cloud;
  }
};

EgoHistory LoadEgoHistory(const fs::path& out) {
  EgoHistory history;
  history.cloud_dir = out / "clouds";
  const fs::path pose_path = out / "poses.txt";
  const fs::path time_path = out / "times.txt";
  if (!fs::exists(pose_path) || !fs::exists(time_path)) return history;
  const auto poses = ReadPoses(pose_path);
  std::istringstream times(ReadTextFile(time_path));
  std::int64_t frame;
  double t;
  std::size_t i = 0;
  while (times >> frame >> t) {
    if (i >= poses.size()) throw FormatError("times.txt has more lines than poses.txt", i + 1);
    history.poses[frame] = poses[i++];
  }
  if (i != poses.size()) throw FormatError("times.txt and poses.txt disagree", i + 1);
  return history;
}

// ---------------------------------------------------------------------------

int GenWorld(std::uint64_t seed, const std::string& preset_name, const std::string& out,
             double duration, Logger& log) {
  const auto preset = TrafficPresetFromName(preset_name);
  if (!preset) throw UsageError("--preset must be low, medium or high");
  GeneratorOptions options;
  options.duration_s = duration;
  const World world = GenerateWorld(seed, *preset, options);
  SaveWorld(out, world);
  log("cmd=gen-world seed={} preset={} statics={} actors={} out={}", seed, preset_name,
      world.statics().size(), world.actors().size(), out);
  return kOk;
}

int InitManifest(const std::string& world_path, const std::string& out, std::uint64_t seed,
                 int n_aux, const std::string& preset_name, Logger& log) {
  const auto preset = TrafficPresetFromName(preset_name);
  if (!preset) throw UsageError("--preset must be low, medium or high");
  if (n_aux < 0) throw UsageError("--n-aux must be >= 0");
  const fs::path out_path(out);
  fs::path world_rel = fs::path(world_path);
  if (world_rel.is_relative()) {
    world_rel = fs::relative(fs::absolute(world_rel), fs::absolute(out_path).parent_path());
  }
  const World world = LoadWorld(world_path);
  SceneManifest m;
  m.world_path = world_rel.generic_string();
  m.seed = seed;
  m.rig = SampleRig(RigBounds{}, n_aux, seed);
  m.tick_s = world.tick();
  m.frame_count = world.frame_count();
  m.traffic_preset = *preset;
  SaveManifest(out_path, m);
  log("cmd=init-manifest world={} n_aux={} frames={} out={}", m.world_path, n_aux,
      m.frame_count, out);
  return kOk;
}

int Simulate(const Common& c, Logger& log) {
  const Scene scene = LoadScene(c);
  if (scene.frames.empty()) {
    log("cmd=simulate warning=empty_frame_range");
    return kOk;
  }
  const fs::path out(c.out);
  fs::create_directories(out / "clouds");
  std::vector<Pose> poses;
  std::string times;
  for (std::int64_t f = scene.frames.first; f <= scene.frames.last; ++f) {
    const double t = scene.time_of(f);
    const auto clouds = SimulateRigScans(scene.world, scene.manifest.rig, t,
                                         scene.manifest.lidar, scene.manifest.seed, scene.threads);
    std::size_t total = 0;
    for (std::size_t s = 0; s < clouds.size(); ++s) {
      WriteCloud(out / "clouds" / CloudName(f, s), clouds[s]);
      total += clouds[s].points.size();
    }
    poses.push_back(clouds.front().sensor_pose);
    times += fmt::format("{} {}\n", f, t);
    log("cmd=simulate frame={} t={} sensors={} ego_points={} total_points={}", f, t,
        clouds.size(), clouds.front().points.size(), total);
  }
  WritePoses(out / "poses.txt", poses);
  WriteTextFile(out / "times.txt", times);
  return kOk;
}

int LabelFrames(const Common& c, Logger& log) {
  const Scene scene = LoadScene(c);
  if (scene.frames.empty()) {
    log("cmd=label warning=empty_frame_range");
    return kOk;
  }
  const fs::path out(c.out);
  fs::create_directories(out / "gt");
  const auto& rig = scene.manifest.rig;
  std::string summary;
  for (std::int64_t f = scene.frames.first; f <= scene.frames.last; ++f) {
    const double t = scene.time_of(f);
    std::vector<PointCloud> clouds;
    bool on_disk = true;
    for (std::size_t s = 0; s < rig.sensor_count(); ++s) {
      on_disk = on_disk && fs::exists(out / "clouds" / CloudName(f, s));
    }
    if (on_disk) {
      for (std::size_t s = 0; s < rig.sensor_count(); ++s) {
        PointCloud cloud = ReadCloud(out / "clouds" / CloudName(f, s));
        cloud.sensor_pose = RigSensorPose(scene.world, rig, s, t);
        cloud.t = t;
        cloud.sensor_id = static_cast<int>(s);
        clouds.push_back(std::move(cloud));
      }
    } else {
      clouds = SimulateRigScans(scene.world, rig, t, scene.manifest.lidar,
                                scene.manifest.seed, scene.threads);
    }
    const Pose ego = RigSensorPose(scene.world, rig, 0, t);
    const CountGrid counts =
        AccumulateClouds(clouds, ego, scene.manifest.grid, scene.r, scene.threads);
    const LabelGrid grid = MajorityVote(counts);
    WriteGrid(out / "gt" / GridName(f), grid);
    const std::string line = fmt::format(
        "frame={} sensors={} source={} r={} observations={} dropped={} valid_fraction={:.6f}", f,
        clouds.size(), on_disk ? "disk" : "simulated", scene.r, counts.in_bounds(),
        counts.dropped(), grid.valid_fraction());
    summary += line + "\n";
    log("cmd=label {}", line);
  }
  WriteTextFile(out / "gt" / "summary.txt", summary);
  return kOk;
}

int AggregateNaive(const Common& c, int window, Logger& log) {
  if (window < 1) throw UsageError("--window must be >= 1");
  const Scene scene = LoadScene(c);
  if (scene.frames.empty()) {
    log("cmd=aggregate-naive warning=empty_frame_range");
    return kOk;
  }
  const fs::path out(c.out);
  const EgoHistory history = LoadEgoHistory(out);
  fs::create_directories(out / "naive");
  for (std::int64_t f = scene.frames.first; f <= scene.frames.last; ++f) {
    if (!history.Has(f)) {
      throw IoError(fmt::format("missing ego cloud or pose for frame {} in {}; run simulate first",
                                f, out.string()));
    }
    std::vector<PointCloud> clouds;
    for (std::int64_t g = std::max<std::int64_t>(0, f - window + 1); g <= f; ++g) {
      if (history.Has(g)) clouds.push_back(history.Load(g, scene.time_of(g)));
    }
    if (static_cast<int>(clouds.size()) < window) {
      log("cmd=aggregate-naive frame={} warning=short_history available={} window={}", f,
          clouds.size(), window);
    }
    const LabelGrid grid =
        NaiveTemporalAggregate(clouds, scene.manifest.grid, scene.r, scene.threads);
    WriteGrid(out / "naive" / GridName(f), grid);
    log("cmd=aggregate-naive frame={} window={} valid_fraction={:.6f}", f, clouds.size(),
        grid.valid_fraction());
  }
  return kOk;
}

json ReportToJson(const MetricsReport& r) {
  json per_class = json::object();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto name = std::string(LabelName(static_cast<Label>(k)));
    per_class[name] = r.semantic.per_class_iou[k] ? json(*r.semantic.per_class_iou[k]) : json(nullptr);
  }
  return {{"miou", r.semantic.miou},
          {"accuracy", r.semantic.accuracy},
          {"per_class_iou", per_class},
          {"geometric",
           {{"precision", r.geometric.precision},
            {"recall", r.geometric.recall},
            {"iou", r.geometric.iou},
            {"vacuous", r.geometric.vacuous},
            {"no_predicted_positives", r.geometric.no_predicted_positives}}},
          {"trace_rate", r.trace_rate ? json(*r.trace_rate) : json(nullptr)},
          {"evaluated_voxels", r.evaluated_voxels}};
}

std::string ReportTable(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::vector<std::string> header = {"Frame", "mIoU", "Accuracy"};
  for (std::size_t k = 0; k < kNumClasses; ++k) header.emplace_back(LabelName(static_cast<Label>(k)));
  for (const char* h : {"Precision", "Recall", "IoU", "TraceRate"}) header.emplace_back(h);
  std::vector<std::vector<std::string>> cells = {header};
  for (const auto& [name, r] : rows) {
    std::vector<std::string> row = {name, FormatPercent(r.semantic.miou),
                                    FormatPercent(r.semantic.accuracy)};
    for (const auto& iou : r.semantic.per_class_iou) row.push_back(iou ? FormatPercent(*iou) : "-");
    row.push_back(FormatPercent(r.geometric.precision));
    row.push_back(FormatPercent(r.geometric.recall));
    row.push_back(FormatPercent(r.geometric.iou));
    row.push_back(r.trace_rate ? FormatPercent(*r.trace_rate) : "-");
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::string text;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      text += i == 0 ? fmt::format("{:<{}}", row[i], width[i])
                     : fmt::format("  {:>{}}", row[i], width[i]);
    }
    text += '\n';
  }
  return text;
}

int Evaluate(const std::string& pred_dir, const std::string& gt_dir, const std::string& out,
             const std::string& format, const std::string& miou_mode, std::ostream& stdout_,
             Logger& log) {
  if (format != "json" && format != "table") throw UsageError("--format must be json or table");
  if (miou_mode != "observed" && miou_mode != "all") {
    throw UsageError("--miou-mode must be observed or all");
  }
  const MiouMode mode = miou_mode == "all" ? MiouMode::kAllClasses : MiouMode::kObservedClasses;
  std::vector<std::string> frames;
  if (!fs::is_directory(gt_dir)) throw IoError("ground-truth directory not found: " + gt_dir);
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.path().extension() == ".grid") frames.push_back(entry.path().filename().string());
  }
  std::sort(frames.begin(), frames.end());
  if (frames.empty()) throw IoError("no .grid files in " + gt_dir);

  std::vector<std::pair<std::string, MetricsReport>> rows;
  MetricsAccumulator total;
  bool undefined = false;
  for (const auto& name : frames) {
    const fs::path pred_path = fs::path(pred_dir) / name;
    if (!fs::exists(pred_path)) throw IoError("prediction missing for " + name);
    const LabelGrid gt = ReadGrid(fs::path(gt_dir) / name);
    const LabelGrid pred = ReadGrid(pred_path);
    MetricsAccumulator frame;
    frame.Add(pred, gt);
    total.Add(pred, gt);
    try {
      MetricsReport report = frame.Report(mode);
      undefined = undefined || !report.trace_rate;
      rows.emplace_back(fs::path(name).stem().string(), report);
    } catch (const UndefinedMetricError& e) {
      throw UndefinedMetricError(name + ": " + e.what());
    }
  }
  const MetricsReport overall = total.Report(mode);
  rows.emplace_back("all", overall);

  json doc;
  doc["miou_mode"] = miou_mode;
  doc["aggregate"] = ReportToJson(overall);
  json per_frame = json::object();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) per_frame[rows[i].first] = ReportToJson(rows[i].second);
  doc["frames"] = per_frame;
  const std::string table = ReportTable(rows);

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  WriteTextFile(out_dir / "report.json", DumpJson(doc));
  WriteTextFile(out_dir / "report.txt", table);
  stdout_ << (format == "json" ? DumpJson(doc) : table);
  log("cmd=evaluate frames={} miou={} accuracy={} trace_rate={}", frames.size(),
      FormatPercent(overall.semantic.miou), FormatPercent(overall.semantic.accuracy),
      overall.trace_rate ? FormatPercent(*overall.trace_rate) : "undefined");
  if (undefined) {
    log("cmd=evaluate warning=trace_rate_undefined");
    return kMetricUndefined;
  }
  return kOk;
}

int Render(const std::string& grid_path, const std::string& out, Logger& log) {
  const LabelGrid grid = ReadGrid(grid_path);
  WriteBev(out, grid);
  log("cmd=render grid={} out={}", grid_path, out);
  return kOk;
}

int Stack(const Common& c, int window, Logger& log) {
  if (window < 1) throw UsageError("--window must be >= 1");
  const Scene scene = LoadScene(c);
  if (scene.frames.empty()) {
    log("cmd=stack warning=empty_frame_range");
    return kOk;
  }
  const std::int64_t last = scene.frames.last;
  const std::int64_t first = last - window + 1;
  if (first < 0) {
    throw UsageError(fmt::format("window {} needs frames {}..{}", window, first, last));
  }
  const fs::path out(c.out);
  const EgoHistory history = LoadEgoHistory(out);
  std::vector<PointCloud> clouds;
  const Rig& rig = scene.manifest.rig;
  for (std::int64_t f = first; f <= last; ++f) {
    const double t = scene.time_of(f);
    if (history.Has(f)) {
      clouds.push_back(history.Load(f, t));
    } else {
      clouds.push_back(SimulateScan(scene.world, RigSensorPose(scene.world, rig, 0, t), t,
                                    scene.manifest.lidar, scene.manifest.seed, 0, scene.threads));
    }
  }
  const OccupancyStack stack = BuildStack(clouds, scene.manifest.grid);
  fs::create_directories(out / "stacks");
  const fs::path path = out / "stacks" / fmt::format("frame_{:06d}_T{}.cst", last, window);
  WriteStack(path, stack);
  const auto shape = stack.shape();
  log("cmd=stack frame={} T={} shape={}x{}x{}x{} out={}", last, window, shape[0], shape[1],
      shape[2], shape[3], path.string());
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log_stream) {
  Logger log(log_stream);
  CLI::App app{"Trace-free semantic scene ground truth toolkit"};
  app.require_subcommand(1);

  std::uint64_t gen_seed = 0;
  std::string preset = "medium";
  std::string gen_out;
  double duration = 10.0;
  auto* gen = app.add_subcommand("gen-world", "generate a procedural world description");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--preset", preset, "traffic density: low|medium|high");
  gen->add_option("--out", gen_out, "world JSON path")->required();
  gen->add_option("--duration", duration, "scene duration in seconds");

  std::string init_world;
  std::string init_out;
  std::uint64_t init_seed = 0;
  int init_n_aux = 20;
  auto* init = app.add_subcommand("init-manifest", "write a scene manifest for a world");
  init->add_option("--world", init_world, "world JSON path")->required();
  init->add_option("--out", init_out, "manifest path")->required();
  init->add_option("--seed", init_seed, "rig and noise seed");
  init->add_option("--n-aux", init_n_aux, "auxiliary sensors");
  init->add_option("--preset", preset, "traffic preset recorded in the manifest");

  Common common;
  int window = 10;
  auto* simulate = app.add_subcommand("simulate", "simulate ego and auxiliary scans");
  AddCommon(simulate, common);
  auto* label = app.add_subcommand("label", "build multi-sensor ground-truth grids");
  AddCommon(label, common);
  auto* naive = app.add_subcommand("aggregate-naive", "sequential-frame baseline grids");
  AddCommon(naive, common);
  naive->add_option("--window", window, "trailing window length T");
  auto* stack = app.add_subcommand("stack", "pose-compensated occupancy stack");
  AddCommon(stack, common);
  stack->add_option("--window", window, "stack height T");

  std::string pred_dir;
  std::string gt_dir;
  std::string eval_out;
  std::string format = "table";
  std::string miou_mode = "observed";
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
  evaluate->add_option("--pred", pred_dir, "directory of predicted grids")->required();
  evaluate->add_option("--gt", gt_dir, "directory of ground-truth grids")->required();
  evaluate->add_option("--out", eval_out, "report directory")->required();
  evaluate->add_option("--format", format, "stdout format: json|table");
  evaluate->add_option("--miou-mode", miou_mode, "observed|all");

  std::string render_grid;
  std::string render_out;
  auto* render = app.add_subcommand("render", "bird's-eye-view PPM of a grid");
  render->add_option("--grid", render_grid, "grid file")->required();
  render->add_option("--out", render_out, "PPM path")->required();

  std::vector<const char*> argv = {"scenegt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    log("error=usage message=\"{}\"", e.what());
    return kUsage;
  }

  try {
    if (gen->parsed()) return GenWorld(gen_seed, preset, gen_out, duration, log);
    if (init->parsed()) return InitManifest(init_world, init_out, init_seed, init_n_aux, preset, log);
    if (simulate->parsed()) return Simulate(common, log);
    if (label->parsed()) return LabelFrames(common, log);
    if (naive->parsed()) return AggregateNaive(common, window, log);
    if (stack->parsed()) return Stack(common, window, log);
    if (evaluate->parsed()) {
      return Evaluate(pred_dir, gt_dir, eval_out, format, miou_mode, out, log);
    }
    if (render->parsed()) return Render(render_grid, render_out, log);
  } catch (const UsageError& e) {
    log("error=usage message=\"{}\"", e.what());
    return kUsage;
  } catch (const UndefinedMetricError& e) {
    log("error=metric_undefined message=\"{}\"", e.what());
    return kMetricUndefined;
  } catch (const std::exception& e) {
    log("error=data message=\"{}\"", e.what());
    return kDataError;
  }
  return kUsage;
}

}  // namespace scenegt::cli
