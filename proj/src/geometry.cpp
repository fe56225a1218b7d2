#include "depthgaze/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depthgaze/parallel.hpp"

namespace depthgaze {

Intrinsics Intrinsics::defaults_for(ImageSize size) {
  const double w = size.width;
  return {w, w, w / 2.0, size.height / 2.0};
}

void Intrinsics::validate(ImageSize size) const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("focal lengths must be positive");
  if (!(cx >= 0.0 && cx < size.width) || !(cy >= 0.0 && cy < size.height)) {
    throw ConfigError("optical centre (" + std::to_string(cx) + ", " + std::to_string(cy) +
                      ") outside the " + std::to_string(size.width) + "x" + std::to_string(size.height) + " image");
  }
}

DepthMap::DepthMap(ImageSize size, std::vector<double> values) : grid_(size, std::move(values)) {
  for (double v : grid_.values()) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInputError("depth values must be finite and non-negative");
  }
}

BinaryMask DepthMap::validity() const {
  BinaryMask mask(size());
  auto out = mask.values();
  const auto in = values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? 1 : 0;
  return mask;
}

std::size_t DepthMap::valid_count() const {
  const auto v = values();
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double d) { return d > 0.0; }));
}

PixelBox PixelBox::clipped(ImageSize size) const {
  return {std::clamp(x_min, 0, size.width), std::clamp(y_min, 0, size.height), std::clamp(x_max, 0, size.width),
          std::clamp(y_max, 0, size.height)};
}

Point2 PixelBox::center() const { return {(x_min + x_max - 1) / 2.0, (y_min + y_max - 1) / 2.0}; }

Vec3 back_project(Point2 pixel, double z, const Intrinsics& k) {
  return {(pixel.x - k.cx) * z / k.fx, (pixel.y - k.cy) * z / k.fy, z};
}

PointCloud project_depth(const DepthMap& depth, const Intrinsics& k) {
  const int h = depth.height();
  const int w = depth.width();
  PointCloud cloud{{}, k, depth.size()};

  // Row offsets first so the parallel fill keeps row-major order.
  std::vector<std::size_t> offsets(static_cast<std::size_t>(h) + 1, 0);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < h; ++a) {
    std::size_t n = 0;
    for (int b = 0; b < w; ++b) n += depth.valid(a, b) ? 1 : 0;
    offsets[static_cast<std::size_t>(a) + 1] = n;
  }
  for (int a = 0; a < h; ++a) offsets[a + 1] += offsets[a];

  cloud.points.resize(offsets.back());
#pragma omp parallel for schedule(static)
  for (int a = 0; a < h; ++a) {
    std::size_t i = offsets[a];
    for (int b = 0; b < w; ++b) {
      const double d = depth.at(a, b);
      if (d <= 0.0) continue;
      cloud.points[i++] = {(b - k.cx) * d / k.fx, (a - k.cy) * d / k.fy, d, {a, b}};
    }
  }
  return cloud;
}

PixelIndex project_to_pixel(const Vec3& p, const Intrinsics& k) {
  if (!(p.z > 0.0)) throw InvalidInputError("cannot re-project a point with z <= 0");
  // nearbyint honours the default rounding mode: nearest, ties to even.
  const double col = std::nearbyint(p.x * k.fx / p.z + k.cx);
  const double row = std::nearbyint(p.y * k.fy / p.z + k.cy);
  constexpr double kLimit = 1e9;
  return {static_cast<int>(std::clamp(row, -kLimit, kLimit)), static_cast<int>(std::clamp(col, -kLimit, kLimit))};
}

BinaryMask reproject_points(std::span<const Point3> points, const Intrinsics& k, ImageSize size) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  // Linear pixel index per point, -1 when off-image; bits are set serially afterwards.
  std::vector<std::ptrdiff_t> target(points.size(), -1);
  bool bad_depth = false;
#pragma omp parallel for schedule(static) reduction(|| : bad_depth)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Point3& p = points[i];
    if (!(p.z > 0.0)) {
      bad_depth = true;
      continue;
    }
    const PixelIndex px = project_to_pixel(p.position(), k);
    if (size.contains(px.row, px.col)) target[i] = static_cast<std::ptrdiff_t>(px.row) * size.width + px.col;
  }
  if (bad_depth) throw InvalidInputError("cannot re-project a point with z <= 0");

  BinaryMask mask(size);
  auto bits = mask.values();
  for (std::ptrdiff_t t : target) {
    if (t >= 0) bits[t] = 1;
  }
  return mask;
}

double region_depth(const DepthMap& depth, const PixelBox& box) {
  const PixelBox clip = box.clipped(depth.size());
  double sum = 0.0;
  std::size_t n = 0;
  for (int a = clip.y_min; a < clip.y_max; ++a) {
    for (int b = clip.x_min; b < clip.x_max; ++b) {
      if (depth.valid(a, b)) {
        sum += depth.at(a, b);
        ++n;
      }
    }
  }
  if (n == 0) throw DegenerateRegionError("no valid depth inside the region");
  return sum / static_cast<double>(n);
}

double target_depth(const DepthMap& depth, PixelIndex pixel, int radius) {
  if (radius < 0) throw ArgumentError("window radius must be non-negative");
  return region_depth(depth, {pixel.col - radius, pixel.row - radius, pixel.col + radius + 1, pixel.row + radius + 1});
}

}  // namespace depthgaze
