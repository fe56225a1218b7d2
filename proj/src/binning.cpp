#include "depthgaze/binning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace depthgaze {

double center_angle_deg(DepthBin bin) {
  switch (bin) {
    case DepthBin::kForward: return 90.0;
    case DepthBin::kIntermediateForward: return 45.0;
    case DepthBin::kSamePlane: return 0.0;
    case DepthBin::kIntermediateBackward: return -45.0;
    case DepthBin::kBackward: return -90.0;
  }
  return 0.0;
}

double center_angle_deg(ImageBin bin) {
  switch (bin) {
    case ImageBin::kLowerRight: return 30.0;
    case ImageBin::kStraight: return 90.0;
    case ImageBin::kLowerLeft: return 150.0;
    case ImageBin::kUpperLeft: return 220.0;
    case ImageBin::kUpperRight: return 320.0;
  }
  return 0.0;
}

DepthBin mirrored(DepthBin bin) {
  switch (bin) {
    case DepthBin::kForward: return DepthBin::kBackward;
    case DepthBin::kIntermediateForward: return DepthBin::kIntermediateBackward;
    case DepthBin::kSamePlane: return DepthBin::kSamePlane;
    case DepthBin::kIntermediateBackward: return DepthBin::kIntermediateForward;
    case DepthBin::kBackward: return DepthBin::kForward;
  }
  return bin;
}

std::string_view to_string(DepthBin bin) {
  switch (bin) {
    case DepthBin::kForward: return "forward";
    case DepthBin::kIntermediateForward: return "intermediate_forward";
    case DepthBin::kSamePlane: return "same_plane";
    case DepthBin::kIntermediateBackward: return "intermediate_backward";
    case DepthBin::kBackward: return "backward";
  }
  return "unknown";
}

std::string_view to_string(ImageBin bin) {
  switch (bin) {
    case ImageBin::kLowerRight: return "lower_right";
    case ImageBin::kStraight: return "straight";
    case ImageBin::kLowerLeft: return "lower_left";
    case ImageBin::kUpperLeft: return "upper_left";
    case ImageBin::kUpperRight: return "upper_right";
  }
  return "unknown";
}

std::optional<DepthBin> depth_bin_from_string(std::string_view name) {
  for (DepthBin b : kDepthBins) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

std::optional<ImageBin> image_bin_from_string(std::string_view name) {
  for (ImageBin b : kImageBins) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

void DepthThresholds::validate() const {
  if (!(gamma1 > 0.0) || !(gamma2 > gamma1)) {
    throw ConfigError("depth thresholds need gamma2 > gamma1 > 0 (got gamma1=" + std::to_string(gamma1) +
                      ", gamma2=" + std::to_string(gamma2) + ")");
  }
}

DepthBin bin_depth_angle(double face_depth, double target_depth, const DepthThresholds& thresholds) {
  thresholds.validate();
  const double diff = face_depth - target_depth;
  const double mag = std::abs(diff);
  if (mag <= thresholds.gamma1) return DepthBin::kSamePlane;
  if (mag <= thresholds.gamma2) return diff > 0.0 ? DepthBin::kIntermediateForward : DepthBin::kIntermediateBackward;
  return diff > 0.0 ? DepthBin::kForward : DepthBin::kBackward;
}

double image_plane_angle(Point2 eye, Point2 gaze) {
  const double dx = gaze.x - eye.x;
  const double dy = gaze.y - eye.y;
  if (dx == 0.0 && dy == 0.0) throw DegenerateGazeError("eye and gaze point coincide");
  double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  // -tiny + 360 can round up to exactly 360.
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

ImageBin bin_image_angle(double alpha_deg) {
  ImageBin best = kImageBins[0];
  double best_dist = 1e300;
  // kImageBins is sorted by center angle, so strict < keeps the smaller center on ties.
  for (ImageBin b : kImageBins) {
    const double d = std::abs(alpha_deg - center_angle_deg(b));
    const double circular = std::min(d, 360.0 - d);
    if (circular < best_dist) {
      best_dist = circular;
      best = b;
    }
  }
  return best;
}

void GazeAnnotation::validate(ImageSize size) const {
  auto inside = [&](Point2 p) { return p.x >= 0.0 && p.x < size.width && p.y >= 0.0 && p.y < size.height; };
  if (!inside(eye)) throw InvalidInputError("eye point outside the image");
  if (!inside(gaze)) throw InvalidInputError("gaze point outside the image");
  for (Point2 p : gaze_list) {
    if (!inside(p)) throw InvalidInputError("annotated gaze point outside the image");
  }
}

PixelIndex nearest_pixel(Point2 p, ImageSize size) {
  const int col = static_cast<int>(std::clamp(std::nearbyint(p.x), 0.0, static_cast<double>(size.width - 1)));
  const int row = static_cast<int>(std::clamp(std::nearbyint(p.y), 0.0, static_cast<double>(size.height - 1)));
  return {row, col};
}

GazeBins bin_gaze(const GazeAnnotation& annotation, const DepthMap& depth, const PixelBox& head_box,
                  const DepthThresholds& thresholds, int target_radius) {
  thresholds.validate();
  annotation.validate(depth.size());
  GazeBins out;
  out.alpha_deg = image_plane_angle(annotation.eye, annotation.gaze);
  out.image = bin_image_angle(out.alpha_deg);
  out.face_depth = face_depth(depth, head_box);
  out.target_depth = target_depth(depth, nearest_pixel(annotation.gaze, depth.size()), target_radius);
  out.depth = bin_depth_angle(out.face_depth, out.target_depth, thresholds);
  return out;
}

}  // namespace depthgaze
