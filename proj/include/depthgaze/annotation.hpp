#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "depthgaze/binning.hpp"
#include "depthgaze/geometry.hpp"

namespace depthgaze {

/// One annotated subject. Boxes and eye are in pixels; gaze points are normalized to [0,1]^2.
struct AnnotationRecord {
  std::string image_path;
  ImageSize image_size;
  PixelBox head_box;
  Point2 eye;
  std::vector<Point2> gaze_points;
  bool in_frame = true;
  /// 1-based line of the first CSV row that contributed to the record.
  std::size_t source_line = 0;

  /// Annotator average of gaze_points.
  Point2 mean_gaze() const;
  Point2 eye_normalized() const;
  /// Eye and averaged gaze in pixel coordinates, with individual annotations in gaze_list.
  GazeAnnotation to_pixel_annotation() const;
};

/// Filename stem of image_path ("dir/img1.jpg" -> "img1").
std::string image_stem(const std::string& image_path);

}  // namespace depthgaze
