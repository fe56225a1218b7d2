#include "depthgaze/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "depthgaze/parallel.hpp"
#include "metrics_detail.hpp"

namespace depthgaze {

Heatmap gaussian_heatmap(Point2 target, ImageSize size, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_heatmap: sigma must be positive");
  Heatmap h(size);
  const double tx = target.x * size.width;
  const double ty = target.y * size.height;
  const double denom = 2.0 * sigma * sigma;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < size.height; ++row) {
    const double dy = row - ty;
    for (int col = 0; col < size.width; ++col) {
      const double dx = col - tx;
      h(row, col) = std::exp(-(dx * dx + dy * dy) / denom);
    }
  }
  return h;
}

BinaryMask binarize_ground_truth(const Heatmap& gt) {
  const double threshold = std::exp(-0.5);
  BinaryMask mask(gt.size());
  auto out = mask.values();
  const auto in = gt.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] >= threshold ? 1 : 0;
  return mask;
}

double mse_heatmap_loss(const Heatmap& h, const Heatmap& h_gt) {
  if (h.size() != h_gt.size()) throw DimensionError("mse_heatmap_loss: heatmap shapes differ");
  const auto a = h.values();
  const auto b = h_gt.values();
  std::vector<double> sq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq[i] = d * d;
  }
  return parallel::pairwise_sum(sq);
}

double auc_score(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("auc_score: score and label counts differ");
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw InvalidInputError("auc_score: NaN score");
    pos += labels[i] ? 1 : 0;
  }
  const std::uint64_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw UndefinedMetricError("auc_score: ground truth has a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Twice the trapezoid area in (fp, tp) count units; integer, hence exact.
  std::uint64_t area2 = 0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::uint64_t dtp = 0;
    std::uint64_t dfp = 0;
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (labels[order[i]]) {
        ++dtp;
      } else {
        ++dfp;
      }
    }
    area2 += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
  }
  return static_cast<double>(area2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double auc_score(const Heatmap& pred, const BinaryMask& gt) {
  if (pred.size() != gt.size()) throw DimensionError("auc_score: prediction and ground truth shapes differ");
  return auc_score(pred.values(), gt.values());
}

double l2_distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double min_distance(Point2 pred, std::span<const Point2> gt_points) {
  if (gt_points.empty()) throw ArgumentError("min_distance: no ground-truth points");
  double best = l2_distance(pred, gt_points.front());
  for (Point2 g : gt_points.subspan(1)) best = std::min(best, l2_distance(pred, g));
  return best;
}

double angular_error(Point2 eye, Point2 pred, Point2 gt) {
  const double px = pred.x - eye.x;
  const double py = pred.y - eye.y;
  const double gx = gt.x - eye.x;
  const double gy = gt.y - eye.y;
  const double np = std::hypot(px, py);
  const double ng = std::hypot(gx, gy);
  if (np == 0.0 || ng == 0.0) throw DegenerateGazeError("angular_error: zero-length gaze vector");
  const double c = std::clamp((px * gx + py * gy) / (np * ng), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Point2 heatmap_argmax(const Heatmap& h) {
  const auto v = h.values();
  if (v.empty()) throw ArgumentError("heatmap_argmax: empty heatmap");
  // max_element returns the first maximum.
  const auto idx = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const auto w = static_cast<std::size_t>(h.width());
  return {static_cast<double>(idx % w) / h.width(), static_cast<double>(idx / w) / h.height()};
}

RecordMetrics evaluate_record(const Heatmap& prediction, const AnnotationRecord& record, const EvalOptions& options) {
  RecordMetrics m;
  if (!record.in_frame || record.gaze_points.empty()) return m;

  const Point2 gt = record.mean_gaze();
  const Point2 pred = heatmap_argmax(prediction);
  m.dist = l2_distance(pred, gt);
  m.min_dist = min_distance(pred, record.gaze_points);
  try {
    m.angular_deg = angular_error(record.eye_normalized(), pred, gt);
  } catch (const DegenerateGazeError&) {
  }
  try {
    const BinaryMask gt_mask = binarize_ground_truth(gaussian_heatmap(gt, prediction.size(), options.sigma));
    m.auc = auc_score(prediction, gt_mask);
  } catch (const UndefinedMetricError&) {
  }
  return m;
}

namespace {

std::optional<double> mean_of(const std::vector<RecordMetrics>& rows, std::optional<double> RecordMetrics::*field,
                              std::size_t& skipped) {
  std::vector<double> vals;
  vals.reserve(rows.size());
  for (const RecordMetrics& r : rows) {
    if (r.*field) {
      vals.push_back(*(r.*field));
    } else {
      ++skipped;
    }
  }
  if (vals.empty()) return std::nullopt;
  return parallel::pairwise_sum(vals) / static_cast<double>(vals.size());
}

}  // namespace

EvalReport summarize(std::vector<RecordMetrics> rows) {
  EvalReport r;
  r.n_samples = rows.size();
  r.auc = mean_of(rows, &RecordMetrics::auc, r.n_skipped.auc);
  r.dist = mean_of(rows, &RecordMetrics::dist, r.n_skipped.dist);
  r.min_dist = mean_of(rows, &RecordMetrics::min_dist, r.n_skipped.min_dist);
  r.angular_deg = mean_of(rows, &RecordMetrics::angular_deg, r.n_skipped.angular);
  r.per_record = std::move(rows);
  return r;
}

void check_eval_inputs(std::span<const Heatmap> predictions, std::span<const AnnotationRecord> records,
                       const EvalOptions& options) {
  if (records.empty()) throw ArgumentError("evaluate: no records");
  if (predictions.size() != records.size()) throw ArgumentError("evaluate: prediction and record counts differ");
  if (!(options.sigma > 0.0)) throw ConfigError("evaluate: sigma must be positive");
  for (const Heatmap& h : predictions) {
    if (h.area() == 0) throw ArgumentError("evaluate: empty prediction heatmap");
  }
}

EvalReport evaluate(std::span<const Heatmap> predictions, std::span<const AnnotationRecord> records,
                    const EvalOptions& options) {
  check_eval_inputs(predictions, records, options);
  std::vector<RecordMetrics> rows(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) rows[i] = evaluate_record(predictions[i], records[i], options);
  return summarize(std::move(rows));
}

}  // namespace depthgaze
