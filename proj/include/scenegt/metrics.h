#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scenegt/grid.h"
#include "scenegt/labels.h"

namespace scenegt {

// Rows are ground-truth classes, columns predictions. The extra last column
// counts valid ground-truth voxels the prediction left Unlabeled.
struct ConfusionMatrix {
  static constexpr std::size_t kCols = kNumClasses + 1;
  std::array<std::array<std::uint64_t, kCols>, kNumClasses> counts{};
  std::uint64_t evaluated_voxels = 0;

  std::uint64_t at(Label gt, Label pred) const {
    const std::size_t col = ToIndex(pred) < kNumClasses ? ToIndex(pred) : kNumClasses;
    return counts[ToIndex(gt)][col];
  }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

// Tallies voxels where gt is valid. Throws PreconditionError on spec mismatch.
ConfusionMatrix Confusion(const LabelGrid& pred, const LabelGrid& gt);

enum class MiouMode {
  kObservedClasses,  // mean over classes with TP + FP + FN > 0
  kAllClasses,       // fixed mean over all 11 classes; absent classes score 0
};

struct SemanticScores {
  // Empty for classes absent from both prediction and ground truth.
  std::array<std::optional<double>, kNumClasses> per_class_iou{};
  double miou = 0.0;
  double accuracy = 0.0;
};

// Throws UndefinedMetricError when nothing was evaluated.
SemanticScores ComputeSemanticScores(const ConfusionMatrix& cm,
                                     MiouMode mode = MiouMode::kObservedClasses);

// Plain mean of a list of per-class IoUs, Free included when listed.
double MeanIou(const std::vector<double>& per_class);

struct GeometricTally {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  GeometricTally& operator+=(const GeometricTally& other);
};

struct GeometricScores {
  double precision = 0.0;
  double recall = 0.0;
  double iou = 0.0;
  // Neither grid has an occupied voxel: all scores defined as 1.
  bool vacuous = false;
  // The prediction has no occupied voxel: precision defined as 0.
  bool no_predicted_positives = false;
};

// Occupied means any class other than Free, over valid ground-truth voxels.
GeometricTally TallyGeometric(const LabelGrid& pred, const LabelGrid& gt);
GeometricScores ComputeGeometricScores(const GeometricTally& tally);
GeometricScores GeometricCompleteness(const LabelGrid& pred, const LabelGrid& gt);

struct TraceTally {
  std::uint64_t dynamic_in_free = 0;  // numerator
  std::uint64_t free_voxels = 0;      // denominator
  TraceTally& operator+=(const TraceTally& other);
};

// Voxels valid in both grids that gt calls Free: how many the aggregate
// labels Pedestrian or Vehicles.
TraceTally TallyTraces(const LabelGrid& aggregate, const LabelGrid& gt);
// Throws UndefinedMetricError when gt has no jointly valid Free voxel.
double TraceRate(const TraceTally& tally);
double TraceRate(const LabelGrid& aggregate, const LabelGrid& gt);

struct MetricsReport {
  SemanticScores semantic;
  GeometricScores geometric;
  std::optional<double> trace_rate;  // empty when undefined
  std::uint64_t evaluated_voxels = 0;
};

// Sums tallies over frames; scores are computed from the pooled counts.
class MetricsAccumulator {
 public:
  void Add(const LabelGrid& pred, const LabelGrid& gt);
  MetricsReport Report(MiouMode mode = MiouMode::kObservedClasses) const;

  const ConfusionMatrix& confusion() const { return confusion_; }

 private:
  ConfusionMatrix confusion_;
  GeometricTally geometric_;
  TraceTally traces_;
};

MetricsReport Evaluate(const LabelGrid& pred, const LabelGrid& gt,
                       MiouMode mode = MiouMode::kObservedClasses);

// Percent with two decimals, e.g. 0.425 -> "42.50".
std::string FormatPercent(double fraction);

}  // namespace scenegt
