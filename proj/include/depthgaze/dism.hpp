#pragma once

#include <optional>
#include <span>
#include <vector>

#include "depthgaze/binning.hpp"
#include "depthgaze/geometry.hpp"

namespace depthgaze {

/// Box anchored at `origin`, spanning [0, length] along axis_u and
/// [-half_width, half_width] x [-half_height, half_height] along axis_v, axis_w.
struct OrientedCuboid {
  Vec3 origin;
  Vec3 axis_u;
  Vec3 axis_v;
  Vec3 axis_w;
  double length = 0.0;
  double half_width = 0.0;
  double half_height = 0.0;

  bool contains(const Vec3& p) const;
  /// Smallest slack over the six faces; positive iff strictly inside.
  double margin(const Vec3& p) const;
};

struct DismParams {
  DepthThresholds thresholds;
  /// Unset: extend to the cloud's far extent along the gaze axis.
  std::optional<double> cuboid_length;
  /// Unset: cross_section_ratio * d_f.
  std::optional<double> cuboid_half_width;
  std::optional<double> cuboid_half_height;
  double cross_section_ratio = 0.15;
  bool head_exclusion = true;
  int target_window_radius = 2;

  void validate() const;
};

/// Unit gaze direction for a bin pair. A positive depth-plane angle points toward
/// the camera (-z): Forward bins mean the target is nearer than the face.
Vec3 gaze_axis(ImageBin image_bin, DepthBin depth_bin);

OrientedCuboid build_cuboid(const Vec3& face_point, ImageBin image_bin, DepthBin depth_bin,
                            const DismParams& params, std::span<const Point3> cloud);

/// Points inside the cuboid, in input order.
std::vector<Point3> filter_points(std::span<const Point3> cloud, const OrientedCuboid& cuboid);

struct DismResult {
  BinaryMask mask;
  std::optional<GazeBins> bins;
  std::optional<OrientedCuboid> cuboid;
  std::size_t captured_points = 0;
  /// No point survived filtering (or the map has no valid depth); mask is all false.
  bool empty_label = false;
};

/// Pseudo-label S_i: bin the gaze, carve the cuboid from the face anchor through the
/// scene cloud and re-project the captured points.
DismResult generate_dism(const DepthMap& depth, const PixelBox& head_box, const GazeAnnotation& annotation,
                         const Intrinsics& k, const DismParams& params);

enum class JaccardForm {
  /// Intersection sum(min), union sum(max). Zero exactly when s == t, for soft masks too.
  kFuzzy,
  /// Intersection sum(s*t), union sum(s + t - s*t).
  kProduct,
};

/// 1 - (I + eps) / (U + eps). Both forms agree on {0,1} masks.
double jaccard_distance(const Heatmap& s, const Heatmap& t, double eps = 1e-6, JaccardForm form = JaccardForm::kFuzzy);
double jaccard_distance(const BinaryMask& s, const BinaryMask& t, double eps = 1e-6);

}  // namespace depthgaze
