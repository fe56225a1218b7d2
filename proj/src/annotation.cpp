#include "depthgaze/annotation.hpp"

#include <algorithm>
#include <filesystem>

namespace depthgaze {

Point2 AnnotationRecord::mean_gaze() const {
  Point2 m;
  for (Point2 p : gaze_points) {
    m.x += p.x;
    m.y += p.y;
  }
  const double n = gaze_points.empty() ? 1.0 : static_cast<double>(gaze_points.size());
  return {m.x / n, m.y / n};
}

Point2 AnnotationRecord::eye_normalized() const {
  return {eye.x / image_size.width, eye.y / image_size.height};
}

GazeAnnotation AnnotationRecord::to_pixel_annotation() const {
  auto to_pixels = [&](Point2 p) { return Point2{p.x * image_size.width, p.y * image_size.height}; };
  GazeAnnotation a;
  a.eye = eye;
  // The normalized range is closed at 1; pull such points onto the last pixel.
  auto clamp_in = [&](Point2 p) {
    p.x = std::min(p.x, image_size.width - 1.0);
    p.y = std::min(p.y, image_size.height - 1.0);
    return p;
  };
  a.gaze = clamp_in(to_pixels(mean_gaze()));
  for (Point2 p : gaze_points) a.gaze_list.push_back(clamp_in(to_pixels(p)));
  return a;
}

std::string image_stem(const std::string& image_path) {
  return std::filesystem::path(image_path).stem().string();
}

}  // namespace depthgaze
