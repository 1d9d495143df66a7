#include "scenegt/metrics.h"

#include <numeric>

#include "fmt/format.h"
#include "scenegt/errors.h"

namespace scenegt {
namespace {

void CheckSameSpec(const LabelGrid& a, const LabelGrid& b) {
  if (!(a.spec() == b.spec())) {
    throw PreconditionError("prediction and ground truth have different grid specs");
  }
}

bool Occupied(Label label) {
  return label != Label::kFree && ToIndex(label) < kNumClasses;
}

}  // namespace

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < kNumClasses; ++i)
    for (std::size_t j = 0; j < kCols; ++j) counts[i][j] += other.counts[i][j];
  evaluated_voxels += other.evaluated_voxels;
  return *this;
}

ConfusionMatrix Confusion(const LabelGrid& pred, const LabelGrid& gt) {
  CheckSameSpec(pred, gt);
  ConfusionMatrix cm;
  const std::size_t n = gt.spec().voxel_count();
  for (std::size_t v = 0; v < n; ++v) {
    if (!gt.valid(v)) continue;
    const auto row = ToIndex(gt.label(v));
    if (row >= kNumClasses) throw PreconditionError("valid ground-truth voxel is Unlabeled");
    const Label p = pred.valid(v) ? pred.label(v) : Label::kUnlabeled;
    const std::size_t col = ToIndex(p) < kNumClasses ? ToIndex(p) : kNumClasses;
    ++cm.counts[row][col];
    ++cm.evaluated_voxels;
  }
  return cm;
}

SemanticScores ComputeSemanticScores(const ConfusionMatrix& cm, MiouMode mode) {
  if (cm.evaluated_voxels == 0) {
    throw UndefinedMetricError("no valid ground-truth voxels were evaluated");
  }
  SemanticScores scores;
  std::uint64_t diagonal = 0;
  double iou_sum = 0.0;
  std::size_t iou_terms = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const std::uint64_t tp = cm.counts[k][k];
    std::uint64_t fp = 0;
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      if (i != k) fp += cm.counts[i][k];
    }
    const std::uint64_t row = std::accumulate(cm.counts[k].begin(), cm.counts[k].end(),
                                              std::uint64_t{0});
    const std::uint64_t fn = row - tp;
    diagonal += tp;
    const std::uint64_t denom = tp + fp + fn;
    if (denom > 0) {
      const double iou = static_cast<double>(tp) / static_cast<double>(denom);
      scores.per_class_iou[k] = iou;
      iou_sum += iou;
      ++iou_terms;
    }
  }
  if (mode == MiouMode::kAllClasses) iou_terms = kNumClasses;
  scores.miou = iou_sum / static_cast<double>(iou_terms);
  scores.accuracy =
      static_cast<double>(diagonal) / static_cast<double>(cm.evaluated_voxels);
  return scores;
}

double MeanIou(const std::vector<double>& per_class) {
  if (per_class.empty()) throw UndefinedMetricError("mean of zero classes");
  return std::accumulate(per_class.begin(), per_class.end(), 0.0) /
         static_cast<double>(per_class.size());
}

GeometricTally& GeometricTally::operator+=(const GeometricTally& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

GeometricTally TallyGeometric(const LabelGrid& pred, const LabelGrid& gt) {
  CheckSameSpec(pred, gt);
  GeometricTally tally;
  const std::size_t n = gt.spec().voxel_count();
  for (std::size_t v = 0; v < n; ++v) {
    if (!gt.valid(v)) continue;
    const bool truth = Occupied(gt.label(v));
    const bool guess = pred.valid(v) && Occupied(pred.label(v));
    if (truth && guess) {
      ++tally.tp;
    } else if (guess) {
      ++tally.fp;
    } else if (truth) {
      ++tally.fn;
    } else {
      ++tally.tn;
    }
  }
  return tally;
}

GeometricScores ComputeGeometricScores(const GeometricTally& t) {
  GeometricScores s;
  if (t.tp + t.fp + t.fn == 0) {
    s.precision = s.recall = s.iou = 1.0;
    s.vacuous = true;
    return s;
  }
  const auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  s.no_predicted_positives = t.tp + t.fp == 0;
  s.precision = ratio(t.tp, t.tp + t.fp);
  s.recall = ratio(t.tp, t.tp + t.fn);
  s.iou = ratio(t.tp, t.tp + t.fp + t.fn);
  return s;
}

GeometricScores GeometricCompleteness(const LabelGrid& pred, const LabelGrid& gt) {
  return ComputeGeometricScores(TallyGeometric(pred, gt));
}

TraceTally& TraceTally::operator+=(const TraceTally& other) {
  dynamic_in_free += other.dynamic_in_free;
  free_voxels += other.free_voxels;
  return *this;
}

TraceTally TallyTraces(const LabelGrid& aggregate, const LabelGrid& gt) {
  CheckSameSpec(aggregate, gt);
  TraceTally tally;
  const std::size_t n = gt.spec().voxel_count();
  for (std::size_t v = 0; v < n; ++v) {
    if (!gt.valid(v) || !aggregate.valid(v) || gt.label(v) != Label::kFree) continue;
    ++tally.free_voxels;
    if (IsDynamic(aggregate.label(v))) ++tally.dynamic_in_free;
  }
  return tally;
}

double TraceRate(const TraceTally& tally) {
  if (tally.free_voxels == 0) {
    throw UndefinedMetricError("no jointly valid Free voxels for the trace rate");
  }
  return static_cast<double>(tally.dynamic_in_free) /
         static_cast<double>(tally.free_voxels);
}

double TraceRate(const LabelGrid& aggregate, const LabelGrid& gt) {
  return TraceRate(TallyTraces(aggregate, gt));
}

void MetricsAccumulator::Add(const LabelGrid& pred, const LabelGrid& gt) {
  confusion_ += Confusion(pred, gt);
  geometric_ += TallyGeometric(pred, gt);
  traces_ += TallyTraces(pred, gt);
}

MetricsReport MetricsAccumulator::Report(MiouMode mode) const {
  MetricsReport report;
  report.semantic = ComputeSemanticScores(confusion_, mode);
  report.geometric = ComputeGeometricScores(geometric_);
  if (traces_.free_voxels > 0) report.trace_rate = TraceRate(traces_);
  report.evaluated_voxels = confusion_.evaluated_voxels;
  return report;
}

MetricsReport Evaluate(const LabelGrid& pred, const LabelGrid& gt, MiouMode mode) {
  MetricsAccumulator acc;
  acc.Add(pred, gt);
  return acc.Report(mode);
}

std::string FormatPercent(double fraction) {
  return fmt::format("{:.2f}", 100.0 * fraction);
}

}  // namespace scenegt
