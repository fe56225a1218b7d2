#include "depthgaze/serial.hpp"

#include <cmath>

#include "metrics_detail.hpp"

namespace depthgaze::serial {

PointCloud project_depth(const DepthMap& depth, const Intrinsics& k) {
  PointCloud cloud{{}, k, depth.size()};
  for (int a = 0; a < depth.height(); ++a) {
    for (int b = 0; b < depth.width(); ++b) {
      const double d = depth.at(a, b);
      if (d > 0.0) cloud.points.push_back({(b - k.cx) * d / k.fx, (a - k.cy) * d / k.fy, d, {a, b}});
    }
  }
  return cloud;
}

BinaryMask reproject_points(std::span<const Point3> points, const Intrinsics& k, ImageSize size) {
  BinaryMask mask(size);
  for (const Point3& p : points) {
    const PixelIndex px = project_to_pixel(p.position(), k);
    if (size.contains(px.row, px.col)) mask.set(px.row, px.col);
  }
  return mask;
}

std::vector<Point3> filter_points(std::span<const Point3> cloud, const OrientedCuboid& cuboid) {
  std::vector<Point3> out;
  for (const Point3& p : cloud) {
    if (cuboid.contains(p.position())) out.push_back(p);
  }
  return out;
}

Heatmap gaussian_heatmap(Point2 target, ImageSize size, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_heatmap: sigma must be positive");
  Heatmap h(size);
  const double tx = target.x * size.width;
  const double ty = target.y * size.height;
  for (int row = 0; row < size.height; ++row) {
    for (int col = 0; col < size.width; ++col) {
      const double dx = col - tx;
      const double dy = row - ty;
      h(row, col) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  return h;
}

std::vector<double> linear_apply(const LinearProjection& proj, std::span<const double> x) {
  if (x.size() != proj.in_dim()) throw DimensionError("linear projection input size mismatch");
  std::vector<double> y(proj.out_dim());
  for (std::size_t r = 0; r < proj.out_dim(); ++r) {
    double acc = proj.bias()[r];
    for (std::size_t c = 0; c < proj.in_dim(); ++c) acc += proj.weight(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

EvalReport evaluate(std::span<const Heatmap> predictions, std::span<const AnnotationRecord> records,
                    const EvalOptions& options) {
  check_eval_inputs(predictions, records, options);
  std::vector<RecordMetrics> rows;
  rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) rows.push_back(evaluate_record(predictions[i], records[i], options));
  return summarize(std::move(rows));
}

}  // namespace depthgaze::serial
