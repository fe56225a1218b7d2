#pragma once

// Single-threaded reference versions of the OpenMP kernels. They share no code
// with the parallel paths beyond the scalar formulas and are kept for tests
// and benchmarks.

#include <span>
#include <vector>

#include "depthgaze/dism.hpp"
#include "depthgaze/fusion.hpp"
#include "depthgaze/geometry.hpp"
#include "depthgaze/metrics.hpp"

namespace depthgaze::serial {

PointCloud project_depth(const DepthMap& depth, const Intrinsics& k);
BinaryMask reproject_points(std::span<const Point3> points, const Intrinsics& k, ImageSize size);
std::vector<Point3> filter_points(std::span<const Point3> cloud, const OrientedCuboid& cuboid);
Heatmap gaussian_heatmap(Point2 target, ImageSize size, double sigma);
std::vector<double> linear_apply(const LinearProjection& proj, std::span<const double> x);
EvalReport evaluate(std::span<const Heatmap> predictions, std::span<const AnnotationRecord> records,
                    const EvalOptions& options = {});

}  // namespace depthgaze::serial
