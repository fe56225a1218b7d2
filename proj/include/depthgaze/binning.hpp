#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "depthgaze/geometry.hpp"

namespace depthgaze {

// Depth-plane sector of a gaze direction. Center angles: +90, +45, 0, -45, -90 degrees.
enum class DepthBin { kForward, kIntermediateForward, kSamePlane, kIntermediateBackward, kBackward };

// Image-plane sector (y grows downward). Center angles: 30, 90, 150, 220, 320 degrees.
enum class ImageBin { kLowerRight, kStraight, kLowerLeft, kUpperLeft, kUpperRight };

inline constexpr std::array<DepthBin, 5> kDepthBins{DepthBin::kForward, DepthBin::kIntermediateForward,
                                                    DepthBin::kSamePlane, DepthBin::kIntermediateBackward,
                                                    DepthBin::kBackward};
inline constexpr std::array<ImageBin, 5> kImageBins{ImageBin::kLowerRight, ImageBin::kStraight,
                                                    ImageBin::kLowerLeft, ImageBin::kUpperLeft,
                                                    ImageBin::kUpperRight};

double center_angle_deg(DepthBin bin);
double center_angle_deg(ImageBin bin);

/// Forward <-> Backward, IntermediateForward <-> IntermediateBackward.
DepthBin mirrored(DepthBin bin);

std::string_view to_string(DepthBin bin);
std::string_view to_string(ImageBin bin);
std::optional<DepthBin> depth_bin_from_string(std::string_view name);
std::optional<ImageBin> image_bin_from_string(std::string_view name);

struct DepthThresholds {
  double gamma1 = 3.0;
  double gamma2 = 10.0;

  /// Throws ConfigError unless gamma2 > gamma1 > 0.
  void validate() const;
};

/// Five-way depth-plane binning of the face/target depth difference.
/// Cases are tested in order: |d_f - d_t| <= gamma1 is SamePlane; a difference in
/// (gamma1, gamma2] is Intermediate; beyond gamma2 is Forward (d_f > d_t) or Backward.
DepthBin bin_depth_angle(double face_depth, double target_depth, const DepthThresholds& thresholds);

/// Quadrant-correct direction from eye to gaze in degrees, [0, 360).
/// Throws DegenerateGazeError when eye == gaze.
double image_plane_angle(Point2 eye, Point2 gaze);

/// Nearest bin center on the circle; ties go to the smaller center angle.
ImageBin bin_image_angle(double alpha_deg);

/// Eye and gaze in pixel coordinates of the depth map.
struct GazeAnnotation {
  Point2 eye;
  Point2 gaze;
  std::vector<Point2> gaze_list;

  void validate(ImageSize size) const;
};

struct GazeBins {
  ImageBin image = ImageBin::kStraight;
  DepthBin depth = DepthBin::kSamePlane;
  double alpha_deg = 0.0;
  double face_depth = 0.0;
  double target_depth = 0.0;
};

/// Nearest pixel to a continuous position (ties to even), clamped into the image.
PixelIndex nearest_pixel(Point2 p, ImageSize size);

/// theta = [theta_xy, theta_d] for one annotated subject.
GazeBins bin_gaze(const GazeAnnotation& annotation, const DepthMap& depth, const PixelBox& head_box,
                  const DepthThresholds& thresholds, int target_radius = 2);

}  // namespace depthgaze
