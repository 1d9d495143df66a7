#include <filesystem>
#include <map>
#include <sstream>

#include "doctest.h"
#include "scenegt/cli.h"
#include "scenegt/io.h"

using namespace scenegt;
namespace fs = std::filesystem;

namespace {

const std::string kManifest = std::string(SCENEGT_DEMO_DIR) + "/demo_manifest.json";

struct Result {
  int code;
  std::string out;
  std::string log;
};

Result RunCli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream log;
  const int code = cli::Run(args, out, log);
  return {code, out.str(), log.str()};
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "scenegt_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t CountFiles(const fs::path& dir) {
  if (!fs::is_directory(dir)) return 0;
  return std::distance(fs::directory_iterator(dir), fs::directory_iterator{});
}

// Every regular file below `dir`, keyed by relative path.
std::map<std::string, Bytes> FilesUnder(const fs::path& dir) {
  std::map<std::string, Bytes> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = ReadFileBytes(e.path());
  return files;
}

}  // namespace

TEST_CASE("gen-world is deterministic and validates its preset") {
  const fs::path dir = Scratch("gen");
  REQUIRE(RunCli({"gen-world", "--seed", "4", "--out", (dir / "a.json").string()}).code == 0);
  REQUIRE(RunCli({"gen-world", "--seed", "4", "--out", (dir / "b.json").string()}).code == 0);
  REQUIRE(RunCli({"gen-world", "--seed", "5", "--out", (dir / "c.json").string()}).code == 0);
  CHECK(ReadFileBytes(dir / "a.json") == ReadFileBytes(dir / "b.json"));
  CHECK(ReadFileBytes(dir / "a.json") != ReadFileBytes(dir / "c.json"));

  CHECK(RunCli({"gen-world", "--preset", "rush", "--out", (dir / "d.json").string()}).code ==
        cli::kUsage);
  CHECK_FALSE(fs::exists(dir / "d.json"));
  CHECK(RunCli({"no-such-command"}).code == cli::kUsage);

  REQUIRE(RunCli({"gen-world", "--seed", "4", "--preset", "low", "--out",
                  (dir / "low.json").string()})
              .code == 0);
  REQUIRE(RunCli({"gen-world", "--seed", "4", "--preset", "high", "--out",
                  (dir / "high.json").string()})
              .code == 0);
  CHECK(LoadWorld(dir / "high.json").actors().size() >
        LoadWorld(dir / "low.json").actors().size());
  CHECK(RunCli({"simulate", "--out", dir.string()}).code == cli::kUsage);

  REQUIRE(RunCli({"init-manifest", "--world", (dir / "a.json").string(), "--out",
                  (dir / "m.json").string(), "--n-aux", "4"})
              .code == 0);
  const SceneManifest m = LoadManifest(dir / "m.json");
  CHECK(m.rig.aux_mounts.size() == 4);
  CHECK(ResolveWorldPath(dir / "m.json", m) == dir / "a.json");
}

TEST_CASE("simulate writes one cloud per sensor and is reproducible") {
  const fs::path a = Scratch("sim_a");
  const fs::path b = Scratch("sim_b");
  for (const auto& dir : {a, b}) {
    const Result r = RunCli({"simulate", "--manifest", kManifest, "--out", dir.string(),
                             "--frames", "50..50"});
    REQUIRE(r.code == 0);
  }
  CHECK(CountFiles(a / "clouds") == 21);
  CHECK(DecodePoses(ReadTextFile(a / "poses.txt")).size() == 1);
  CHECK(FilesUnder(a) == FilesUnder(b));

  const Result empty = RunCli({"simulate", "--manifest", kManifest, "--out",
                               Scratch("sim_empty").string(), "--frames", "5..4"});
  CHECK(empty.code == 0);
  CHECK(empty.log.find("warning") != std::string::npos);

  CHECK(RunCli({"simulate", "--manifest", kManifest, "--out", Scratch("sim_bad").string(),
                "--frames", "90..120"})
            .code != 0);
  CHECK(RunCli({"simulate", "--manifest", "/nonexistent/m.json", "--out",
                Scratch("sim_missing").string()})
            .code == cli::kDataError);
}

TEST_CASE("label, evaluate and render") {
  const fs::path dir = Scratch("label");
  REQUIRE(RunCli({"simulate", "--manifest", kManifest, "--out", dir.string(), "--frames",
                  "50..50", "--n-aux", "3"})
              .code == 0);
  REQUIRE(RunCli({"label", "--manifest", kManifest, "--out", dir.string(), "--frames", "50..50",
                  "--n-aux", "3"})
              .code == 0);
  const fs::path grid = dir / "gt" / "frame_000050.grid";
  REQUIRE(fs::exists(grid));
  const LabelGrid gt = ReadGrid(grid);
  CHECK(gt.valid_count() > 0);

  // A coarser free-space step labels fewer voxels.
  const fs::path coarse = Scratch("label_coarse");
  REQUIRE(RunCli({"label", "--manifest", kManifest, "--out", coarse.string(), "--frames",
                  "50..50", "--n-aux", "3", "--r", "3.0"})
              .code == 0);
  CHECK(ReadGrid(coarse / "gt" / "frame_000050.grid").valid_count() < gt.valid_count());
  CHECK(RunCli({"label", "--manifest", kManifest, "--out", coarse.string(), "--frames", "50..50",
                "--r", "-1"})
            .code == cli::kUsage);

  const fs::path report = Scratch("report");
  const Result json = RunCli({"evaluate", "--pred", (dir / "gt").string(), "--gt",
                              (dir / "gt").string(), "--out", report.string(), "--format", "json"});
  REQUIRE(json.code == 0);
  const auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["aggregate"]["miou"].get<double>() == 1.0);
  CHECK(doc["aggregate"]["accuracy"].get<double>() == 1.0);
  CHECK(doc["aggregate"]["geometric"]["precision"].get<double>() == 1.0);
  CHECK(doc["aggregate"]["geometric"]["recall"].get<double>() == 1.0);
  CHECK(doc["aggregate"]["geometric"]["iou"].get<double>() == 1.0);
  CHECK(doc["aggregate"]["trace_rate"].get<double>() == 0.0);
  CHECK(fs::exists(report / "report.json"));
  const Result table = RunCli({"evaluate", "--pred", (dir / "gt").string(), "--gt",
                               (dir / "gt").string(), "--out", report.string()});
  CHECK(table.out.find("100.00") != std::string::npos);

  // Predictions on a different grid are rejected before any report exists.
  const fs::path other = Scratch("other_pred");
  GridSpec spec;
  spec.shape = {64, 64, 8};
  WriteGrid(other / "frame_000050.grid", LabelGrid(spec));
  const fs::path bad_report = Scratch("bad_report");
  fs::remove_all(bad_report);
  const Result bad = RunCli({"evaluate", "--pred", other.string(), "--gt", (dir / "gt").string(),
                             "--out", bad_report.string()});
  CHECK(bad.code != 0);
  CHECK_FALSE(fs::exists(bad_report / "report.json"));

  // All-invalid predictions make the trace rate undefined.
  const fs::path blank = Scratch("blank_pred");
  WriteGrid(blank / "frame_000050.grid", LabelGrid(GridSpec{}));
  CHECK(RunCli({"evaluate", "--pred", blank.string(), "--gt", (dir / "gt").string(), "--out",
                Scratch("blank_report").string()})
            .code == cli::kMetricUndefined);

  const fs::path ppm = dir / "bev.ppm";
  REQUIRE(RunCli({"render", "--grid", grid.string(), "--out", ppm.string()}).code == 0);
  const Bytes img = ReadFileBytes(ppm);
  CHECK(img.size() == std::string("P6\n128 128\n255\n").size() + 3 * 128 * 128);
  CHECK(RunCli({"render", "--grid", (dir / "missing.grid").string(), "--out", ppm.string()})
            .code == cli::kDataError);
}

TEST_CASE("more auxiliary sensors label more voxels") {
  const fs::path none = Scratch("aux0");
  const fs::path full = Scratch("aux20");
  REQUIRE(RunCli({"label", "--manifest", kManifest, "--out", none.string(), "--frames", "50..50",
                  "--n-aux", "0"})
              .code == 0);
  REQUIRE(RunCli({"label", "--manifest", kManifest, "--out", full.string(), "--frames", "50..50"})
              .code == 0);
  CHECK(ReadGrid(none / "gt" / "frame_000050.grid").valid_count() <
        ReadGrid(full / "gt" / "frame_000050.grid").valid_count());
}

TEST_CASE("naive aggregation and stacks") {
  const fs::path dir = Scratch("naive");
  CHECK(RunCli({"aggregate-naive", "--manifest", kManifest, "--out", dir.string(), "--frames",
                "50..50", "--window", "5"})
            .code == cli::kDataError);
  REQUIRE(RunCli({"simulate", "--manifest", kManifest, "--out", dir.string(), "--frames",
                  "46..50", "--n-aux", "0"})
              .code == 0);
  REQUIRE(RunCli({"aggregate-naive", "--manifest", kManifest, "--out", dir.string(), "--frames",
                  "50..50", "--window", "5"})
              .code == 0);
  CHECK(ReadGrid(dir / "naive" / "frame_000050.grid").valid_count() > 0);

  // The baseline leaves traces of the oncoming car against single-instant labels.
  REQUIRE(RunCli({"label", "--manifest", kManifest, "--out", dir.string(), "--frames", "50..50",
                  "--n-aux", "0"})
              .code == 0);
  const Result eval = RunCli({"evaluate", "--pred", (dir / "naive").string(), "--gt",
                              (dir / "gt").string(), "--out", (dir / "report").string(),
                              "--format", "json"});
  REQUIRE(eval.code == 0);
  CHECK(nlohmann::json::parse(eval.out)["aggregate"]["trace_rate"].get<double>() > 0.0);

  // A window reaching past the recorded history uses what exists and warns.
  const Result shortened = RunCli({"aggregate-naive", "--manifest", kManifest, "--out",
                                   dir.string(), "--frames", "47..47", "--window", "10"});
  CHECK(shortened.code == 0);
  CHECK(shortened.log.find("short_history") != std::string::npos);

  for (const int t : {5, 16}) {
    REQUIRE(RunCli({"stack", "--manifest", kManifest, "--out", dir.string(), "--frames", "50..50",
                    "--window", std::to_string(t)})
                .code == 0);
    const OccupancyStack s =
        ReadStack(dir / "stacks" / ("frame_000050_T" + std::to_string(t) + ".cst"));
    CHECK(s.shape() == std::array<std::size_t, 4>{std::size_t(t), 8, 128, 128});
  }
  CHECK(RunCli({"stack", "--manifest", kManifest, "--out", dir.string(), "--frames", "3..3",
                "--window", "10"})
            .code == cli::kUsage);
}

TEST_CASE("thread count does not change any output byte") {
  std::map<std::string, Bytes> runs[2];
  int i = 0;
  for (const char* threads : {"1", "8"}) {
    const fs::path dir = Scratch(std::string("threads_") + threads);
    for (const char* cmd : {"simulate", "label"}) {
      REQUIRE(RunCli({cmd, "--manifest", kManifest, "--out", dir.string(), "--frames", "48..49",
                      "--n-aux", "4", "--threads", threads})
                  .code == 0);
    }
    REQUIRE(RunCli({"stack", "--manifest", kManifest, "--out", dir.string(), "--frames", "49..49",
                    "--window", "2", "--threads", threads})
                .code == 0);
    runs[i++] = FilesUnder(dir);
  }
  CHECK(runs[0].size() == 5 * 2 + 2 + 3 + 1);
  CHECK(runs[0] == runs[1]);
}
