#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "depthgaze/annotation.hpp"
#include "depthgaze/grid.hpp"
#include "depthgaze/vec.hpp"

namespace depthgaze {

/// exp(-|p - target*size|^2 / (2 sigma^2)) over pixel-index coordinates.
/// Throws ConfigError when sigma <= 0.
Heatmap gaussian_heatmap(Point2 target, ImageSize size, double sigma);

/// Positive where the ground-truth Gaussian is at least exp(-1/2), i.e. within one sigma.
BinaryMask binarize_ground_truth(const Heatmap& gt);

/// Sum of squared per-pixel differences.
double mse_heatmap_loss(const Heatmap& h, const Heatmap& h_gt);

/// ROC area from a descending threshold sweep; tied scores form one ROC step,
/// which makes the result equal to P(s+ > s-) + P(s+ == s-)/2.
/// Throws UndefinedMetricError when labels are single-class.
double auc_score(std::span<const double> scores, std::span<const std::uint8_t> labels);
double auc_score(const Heatmap& pred, const BinaryMask& gt);

double l2_distance(Point2 a, Point2 b);
double min_distance(Point2 pred, std::span<const Point2> gt_points);

/// Angle between (pred - eye) and (gt - eye) in degrees, [0, 180].
double angular_error(Point2 eye, Point2 pred, Point2 gt);

/// Normalized (col / W, row / H) of the maximum; first in row-major order on ties.
Point2 heatmap_argmax(const Heatmap& h);

struct RecordMetrics {
  std::optional<double> auc;
  std::optional<double> dist;
  std::optional<double> min_dist;
  std::optional<double> angular_deg;
};

struct SkipCounts {
  std::size_t auc = 0;
  std::size_t dist = 0;
  std::size_t min_dist = 0;
  std::size_t angular = 0;
};

struct EvalReport {
  std::optional<double> auc;
  std::optional<double> dist;
  std::optional<double> min_dist;
  std::optional<double> angular_deg;
  std::size_t n_samples = 0;
  SkipCounts n_skipped;
  std::vector<RecordMetrics> per_record;
};

struct EvalOptions {
  /// Ground-truth Gaussian width in prediction pixels.
  double sigma = 3.0;
};

/// Metrics for one prediction; failures of individual metrics leave them unset.
RecordMetrics evaluate_record(const Heatmap& prediction, const AnnotationRecord& record, const EvalOptions& options);

/// Per-record metrics (computed in parallel) averaged with pairwise summation.
/// Out-of-frame records count as skipped for every metric.
EvalReport evaluate(std::span<const Heatmap> predictions, std::span<const AnnotationRecord> records,
                    const EvalOptions& options = {});

}  // namespace depthgaze
