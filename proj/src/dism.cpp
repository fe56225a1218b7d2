#include "depthgaze/dism.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthgaze/parallel.hpp"

namespace depthgaze {
namespace {

// Exact at multiples of 90 degrees so axis-aligned bins give exact unit axes.
double cos_deg(double deg) {
  const double r = std::fmod(std::abs(deg), 360.0);
  if (r == 90.0 || r == 270.0) return 0.0;
  return std::cos(deg * std::numbers::pi / 180.0);
}

double sin_deg(double deg) {
  const double r = std::fmod(deg, 360.0);
  if (r == 0.0 || r == 180.0 || r == -180.0) return 0.0;
  return std::sin(deg * std::numbers::pi / 180.0);
}

}  // namespace

bool OrientedCuboid::contains(const Vec3& p) const {
  const Vec3 d = p - origin;
  const double u = dot(d, axis_u);
  return u >= 0.0 && u <= length && std::abs(dot(d, axis_v)) <= half_width && std::abs(dot(d, axis_w)) <= half_height;
}

double OrientedCuboid::margin(const Vec3& p) const {
  const Vec3 d = p - origin;
  const double u = dot(d, axis_u);
  return std::min({u, length - u, half_width - std::abs(dot(d, axis_v)), half_height - std::abs(dot(d, axis_w))});
}

void DismParams::validate() const {
  thresholds.validate();
  auto positive = [](const std::optional<double>& v) { return !v || *v > 0.0; };
  if (!positive(cuboid_length) || !positive(cuboid_half_width) || !positive(cuboid_half_height)) {
    throw ConfigError("cuboid extents must be positive");
  }
  if (!(cross_section_ratio > 0.0)) throw ConfigError("cross_section_ratio must be positive");
  if (target_window_radius < 0) throw ConfigError("target_window_radius must be non-negative");
}

Vec3 gaze_axis(ImageBin image_bin, DepthBin depth_bin) {
  const double xy = center_angle_deg(image_bin);
  const double d = center_angle_deg(depth_bin);
  return normalized({cos_deg(xy) * cos_deg(d), sin_deg(xy) * cos_deg(d), -sin_deg(d)});
}

OrientedCuboid build_cuboid(const Vec3& face_point, ImageBin image_bin, DepthBin depth_bin, const DismParams& params,
                            std::span<const Point3> cloud) {
  OrientedCuboid c;
  c.origin = face_point;
  c.axis_u = gaze_axis(image_bin, depth_bin);
  Vec3 side = cross(c.axis_u, {0.0, 0.0, 1.0});
  if (norm(side) < 1e-6) side = cross(c.axis_u, {1.0, 0.0, 0.0});
  c.axis_v = normalized(side);
  c.axis_w = cross(c.axis_u, c.axis_v);

  if (params.cuboid_length) {
    c.length = *params.cuboid_length;
  } else {
    double far = 0.0;
    for (const Point3& p : cloud) far = std::max(far, dot(p.position() - c.origin, c.axis_u));
    c.length = std::max(far, 1e-9);
  }
  const double scale = params.cross_section_ratio * face_point.z;
  c.half_width = params.cuboid_half_width.value_or(scale);
  c.half_height = params.cuboid_half_height.value_or(scale);
  return c;
}

std::vector<Point3> filter_points(std::span<const Point3> cloud, const OrientedCuboid& cuboid) {
  const auto n = static_cast<std::ptrdiff_t>(cloud.size());
  std::vector<std::uint8_t> keep(cloud.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) keep[i] = cuboid.contains(cloud[i].position()) ? 1 : 0;

  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(std::count(keep.begin(), keep.end(), std::uint8_t{1})));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep[i]) out.push_back(cloud[i]);
  }
  return out;
}

DismResult generate_dism(const DepthMap& depth, const PixelBox& head_box, const GazeAnnotation& annotation,
                         const Intrinsics& k, const DismParams& params) {
  params.validate();
  k.validate(depth.size());
  annotation.validate(depth.size());

  DismResult result;
  result.mask = BinaryMask(depth.size());
  if (depth.valid_count() == 0) {
    result.empty_label = true;
    return result;
  }

  const GazeBins bins = bin_gaze(annotation, depth, head_box, params.thresholds, params.target_window_radius);
  const Vec3 face = back_project(head_box.clipped(depth.size()).center(), bins.face_depth, k);
  const PointCloud cloud = project_depth(depth, k);
  const OrientedCuboid cuboid = build_cuboid(face, bins.image, bins.depth, params, cloud.points);
  const std::vector<Point3> captured = filter_points(cloud.points, cuboid);

  result.mask = reproject_points(captured, k, depth.size());
  if (params.head_exclusion) {
    const PixelBox clip = head_box.clipped(depth.size());
    for (int a = clip.y_min; a < clip.y_max; ++a) {
      for (int b = clip.x_min; b < clip.x_max; ++b) result.mask.set(a, b, false);
    }
  }
  result.bins = bins;
  result.cuboid = cuboid;
  result.captured_points = captured.size();
  result.empty_label = result.mask.count() == 0;
  return result;
}

double jaccard_distance(const Heatmap& s, const Heatmap& t, double eps, JaccardForm form) {
  if (s.size() != t.size()) throw DimensionError("jaccard_distance: mask shapes differ");
  if (!(eps > 0.0)) throw ArgumentError("jaccard_distance: eps must be positive");
  const auto a = s.values();
  const auto b = t.values();
  double inter = 0.0;
  double uni = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
      throw InvalidInputError("jaccard_distance: mask values must lie in [0, 1]");
    }
    if (form == JaccardForm::kFuzzy) {
      inter += std::min(x, y);
      uni += std::max(x, y);
    } else {
      inter += x * y;
      uni += x + y - x * y;
    }
  }
  return 1.0 - (inter + eps) / (uni + eps);
}

double jaccard_distance(const BinaryMask& s, const BinaryMask& t, double eps) {
  if (s.size() != t.size()) throw DimensionError("jaccard_distance: mask shapes differ");
  if (!(eps > 0.0)) throw ArgumentError("jaccard_distance: eps must be positive");
  const auto a = s.values();
  const auto b = t.values();
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] & b[i]);
    uni += (a[i] | b[i]);
  }
  return 1.0 - (static_cast<double>(inter) + eps) / (static_cast<double>(uni) + eps);
}

}  // namespace depthgaze
