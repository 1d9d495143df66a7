#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <filesystem>
#include <optional>

#include "scenegt/errors.h"
#include "scenegt/ground_truth.h"
#include "scenegt/io.h"
#include "scenegt/labeler.h"
#include "scenegt/metrics.h"
#include "scenegt/oracle.h"
#include "scenegt/world_gen.h"

namespace py = pybind11;
using namespace scenegt;

namespace {

using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

U8 GridArray(const GridSpec& spec, const std::vector<std::uint8_t>& data) {
  U8 out({spec.shape[0], spec.shape[1], spec.shape[2]});
  std::memcpy(out.mutable_data(), data.data(), data.size());
  return out;
}

std::vector<std::uint8_t> FlatBytes(const U8& a, const GridSpec& spec, const char* what) {
  if (a.ndim() != 3 || std::size_t(a.shape(0)) != spec.shape[0] ||
      std::size_t(a.shape(1)) != spec.shape[1] || std::size_t(a.shape(2)) != spec.shape[2]) {
    throw PreconditionError(std::string(what) + " must have shape (X, Y, Z) of the grid spec");
  }
  return {a.data(), a.data() + a.size()};
}

GridSpec SpecFrom(std::array<double, 3> lo, std::array<double, 3> hi,
                  std::array<std::uint32_t, 3> shape) {
  GridSpec spec;
  spec.min = {lo[0], lo[1], lo[2]};
  spec.max = {hi[0], hi[1], hi[2]};
  spec.shape = shape;
  spec.Validate();
  return spec;
}

py::dict ReportDict(const MetricsReport& r) {
  py::dict d;
  py::list per_class;
  for (const auto& iou : r.semantic.per_class_iou) {
    per_class.append(iou ? py::object(py::float_(*iou)) : py::object(py::none()));
  }
  d["miou"] = r.semantic.miou;
  d["accuracy"] = r.semantic.accuracy;
  d["per_class_iou"] = per_class;
  d["precision"] = r.geometric.precision;
  d["recall"] = r.geometric.recall;
  d["completeness_iou"] = r.geometric.iou;
  d["vacuous"] = r.geometric.vacuous;
  d["no_predicted_positives"] = r.geometric.no_predicted_positives;
  d["trace_rate"] = r.trace_rate ? py::object(py::float_(*r.trace_rate)) : py::object(py::none());
  d["evaluated_voxels"] = r.evaluated_voxels;
  return d;
}

MiouMode ParseMode(const std::string& mode) {
  if (mode == "observed") return MiouMode::kObservedClasses;
  if (mode == "all") return MiouMode::kAllClasses;
  throw PreconditionError("miou_mode must be 'observed' or 'all'");
}

// A manifest with its world, ready to simulate.
struct Scene {
  SceneManifest manifest;
  World world;

  double time(std::int64_t frame) const {
    if (frame < 0 || frame > manifest.frame_count) throw RangeError("frame out of range");
    return frame * manifest.tick_s;
  }
  Rig RigWith(std::optional<int> n_aux) const {
    Rig rig = manifest.rig;
    if (n_aux) {
      if (*n_aux < 0) throw PreconditionError("n_aux must be non-negative");
      Rig sampled = SampleRig(rig.bounds, *n_aux, rig.seed);
      sampled.ego_mount = rig.ego_mount;
      rig = sampled;
    }
    return rig;
  }
  LidarSpec Lidar(bool noise) const {
    LidarSpec l = manifest.lidar;
    if (!noise) l.noise_bound = 0.0;
    return l;
  }
  std::vector<PointCloud> EgoWindow(std::int64_t frame, int window, bool noise,
                                    int threads) const {
    if (window < 1 || frame - window + 1 < 0) throw PreconditionError("window exceeds the scene");
    std::vector<PointCloud> clouds;
    for (std::int64_t f = frame - window + 1; f <= frame; ++f) {
      const double t = time(f);
      clouds.push_back(SimulateScan(world, RigSensorPose(world, manifest.rig, 0, t), t,
                                    Lidar(noise), manifest.seed, 0, threads));
    }
    return clouds;
  }
};

}  // namespace

PYBIND11_MODULE(_scenegt, m) {
  m.doc() = "Trace-free semantic scene ground truth";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ArithmeticError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.attr("NUM_CLASSES") = kNumClasses;
  m.def("class_names", [] {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < kNumClasses; ++i)
      names.emplace_back(LabelName(static_cast<Label>(i)));
    return names;
  });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init(&SpecFrom), py::arg("min") = std::array<double, 3>{-25.6, -25.6, -2.0},
           py::arg("max") = std::array<double, 3>{25.6, 25.6, 1.0},
           py::arg("shape") = std::array<std::uint32_t, 3>{128, 128, 8})
      .def_property_readonly("min", [](const GridSpec& s) {
        return std::array<double, 3>{s.min.x(), s.min.y(), s.min.z()};
      })
      .def_property_readonly("max", [](const GridSpec& s) {
        return std::array<double, 3>{s.max.x(), s.max.y(), s.max.z()};
      })
      .def_readonly("shape", &GridSpec::shape)
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; });

  py::class_<LabelGrid>(m, "Grid")
      .def(py::init<const GridSpec&>(), py::arg("spec") = GridSpec{})
      .def_static(
          "from_arrays",
          [](const U8& labels, const U8& valid, const GridSpec& spec) {
            return LabelGrid::FromRaw(spec, FlatBytes(labels, spec, "labels"),
                                      FlatBytes(valid, spec, "valid"));
          },
          py::arg("labels"), py::arg("valid"), py::arg("spec") = GridSpec{})
      .def_property_readonly("spec", &LabelGrid::spec)
      .def_property_readonly("labels",
                             [](const LabelGrid& g) { return GridArray(g.spec(), g.raw_labels()); })
      .def_property_readonly("valid",
                             [](const LabelGrid& g) { return GridArray(g.spec(), g.raw_valid()); })
      .def_property_readonly("valid_fraction", &LabelGrid::valid_fraction)
      .def("to_bytes", [](const LabelGrid& g) {
        const Bytes b = EncodeGrid(g);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      })
      .def_static("from_bytes", [](const py::bytes& data) {
        const std::string s = data;
        return DecodeGrid(Bytes(s.begin(), s.end()));
      })
      .def("__eq__", [](const LabelGrid& a, const LabelGrid& b) { return a == b; });

  m.def("read_grid", [](const std::string& path) { return ReadGrid(path); });
  m.def("write_grid", [](const std::string& path, const LabelGrid& g) { WriteGrid(path, g); });

  m.def(
      "evaluate",
      [](const LabelGrid& pred, const LabelGrid& gt, const std::string& mode) {
        return ReportDict(Evaluate(pred, gt, ParseMode(mode)));
      },
      py::arg("pred"), py::arg("gt"), py::arg("miou_mode") = "observed");
  m.def(
      "trace_rate", [](const LabelGrid& agg, const LabelGrid& gt) { return TraceRate(agg, gt); },
      py::arg("aggregate"), py::arg("gt"));
  m.def(
      "mean_iou", [](const std::vector<double>& v) { return MeanIou(v); }, py::arg("per_class"));

  m.def(
      "free_samples",
      [](std::array<double, 3> endpoint, double r) {
        PointCloud cloud;
        cloud.points.push_back(
            {Eigen::Vector3d(endpoint[0], endpoint[1], endpoint[2]).cast<float>(),
             RawLabel::kOther});
        const ObservationSet obs = RayTraceObservations(cloud, r);
        const std::size_t n = obs.observations.empty() ? 0 : obs.observations.size() - 1;
        py::array_t<double> out({n, std::size_t{3}});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t i = 1; i < obs.observations.size(); ++i)
          for (int k = 0; k < 3; ++k) view(i - 1, k) = obs.observations[i].position[k];
        return out;
      },
      py::arg("endpoint"), py::arg("r"),
      "Free-space samples along the ray from the origin to `endpoint` (stored as float32).");

  m.def(
      "generate_world",
      [](const std::string& path, std::uint64_t seed, const std::string& preset) {
        TrafficPreset p;
        if (preset == "low") {
          p = TrafficPreset::kLow;
        } else if (preset == "medium") {
          p = TrafficPreset::kMedium;
        } else if (preset == "high") {
          p = TrafficPreset::kHigh;
        } else {
          throw PreconditionError("preset must be low, medium or high");
        }
        SaveWorld(path, GenerateWorld(seed, p));
      },
      py::arg("path"), py::arg("seed") = 0, py::arg("preset") = "medium");

  py::class_<Scene>(m, "Scene")
      .def_static(
          "load",
          [](const std::string& manifest_path) {
            SceneManifest mf = LoadManifest(manifest_path);
            World w = LoadWorld(ResolveWorldPath(manifest_path, mf));
            return Scene{std::move(mf), std::move(w)};
          },
          py::arg("manifest"))
      .def_property_readonly("frame_count", [](const Scene& s) { return s.manifest.frame_count; })
      .def_property_readonly("tick", [](const Scene& s) { return s.manifest.tick_s; })
      .def_property_readonly("n_aux", [](const Scene& s) { return s.manifest.rig.aux_mounts.size(); })
      .def_property_readonly("grid_spec", [](const Scene& s) { return s.manifest.grid; })
      .def(
          "scan",
          [](const Scene& s, std::int64_t frame, std::size_t sensor, bool noise, int threads) {
            const double t = s.time(frame);
            const Rig& rig = s.manifest.rig;
            if (sensor >= rig.sensor_count()) throw RangeError("sensor id out of range");
            const PointCloud c = SimulateScan(s.world, RigSensorPose(s.world, rig, sensor, t), t,
                                              s.Lidar(noise), s.manifest.seed, int(sensor), threads);
            py::array_t<float> xyz({c.points.size(), std::size_t{3}});
            py::array_t<std::uint8_t> labels(c.points.size());
            auto pv = xyz.mutable_unchecked<2>();
            auto lv = labels.mutable_unchecked<1>();
            for (std::size_t i = 0; i < c.points.size(); ++i) {
              for (int k = 0; k < 3; ++k) pv(i, k) = c.points[i].position[k];
              lv(i) = ToIndex(c.points[i].label);
            }
            return py::make_tuple(xyz, labels);
          },
          py::arg("frame"), py::arg("sensor") = 0, py::arg("noise") = true, py::arg("threads") = 1,
          "Sensor-frame points (N, 3) float32 and raw labels (N,) uint8.")
      .def(
          "ground_truth",
          [](const Scene& s, std::int64_t frame, std::optional<double> r,
             std::optional<int> n_aux, bool noise, int threads) {
            py::gil_scoped_release release;
            return BuildGroundTruth(s.world, s.RigWith(n_aux), s.manifest.grid, s.time(frame),
                                    s.Lidar(noise), r.value_or(s.manifest.free_step),
                                    s.manifest.seed, threads);
          },
          py::arg("frame"), py::arg("r") = py::none(), py::arg("n_aux") = py::none(),
          py::arg("noise") = true, py::arg("threads") = 1)
      .def(
          "naive",
          [](const Scene& s, std::int64_t frame, int window, std::optional<double> r, bool noise,
             int threads) {
            py::gil_scoped_release release;
            const auto clouds = s.EgoWindow(frame, window, noise, threads);
            return NaiveTemporalAggregate(clouds, s.manifest.grid,
                                          r.value_or(s.manifest.free_step), threads);
          },
          py::arg("frame"), py::arg("window") = 10, py::arg("r") = py::none(),
          py::arg("noise") = true, py::arg("threads") = 1)
      .def(
          "oracle",
          [](const Scene& s, std::int64_t frame) {
            const double t = s.time(frame);
            return OracleGrid(s.world, t, RigSensorPose(s.world, s.manifest.rig, 0, t),
                              s.manifest.grid);
          },
          py::arg("frame"))
      .def(
          "stack",
          [](const Scene& s, std::int64_t frame, int window, bool noise, int threads) {
            const auto clouds = s.EgoWindow(frame, window, noise, threads);
            const OccupancyStack stack = BuildStack(clouds, s.manifest.grid);
            const auto shape = stack.shape();
            py::array_t<std::uint8_t> out({shape[0], shape[1], shape[2], shape[3]});
            const std::size_t layer = shape[1] * shape[2] * shape[3];
            for (std::size_t t = 0; t < shape[0]; ++t)
              std::memcpy(out.mutable_data() + t * layer, stack.grids[t].cells().data(), layer);
            return out;
          },
          py::arg("frame"), py::arg("window") = 10, py::arg("noise") = true,
          py::arg("threads") = 1, "Occupancy stack (T, Z, X, Y); index 0 is the newest frame.");
}
