#pragma once

#include <span>
#include <vector>

#include "depthgaze/grid.hpp"
#include "depthgaze/vec.hpp"

namespace depthgaze {

/// Pinhole intrinsics in pixels. Extrinsics are the identity.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// f = W, optical centre at the image middle (about 53 degrees horizontal FOV).
  static Intrinsics defaults_for(ImageSize size);

  /// Throws ConfigError unless fx, fy > 0 and the optical centre lies inside `size`.
  void validate(ImageSize size) const;

  bool operator==(const Intrinsics&) const = default;
};

/// H x W relative depth. A pixel is valid when its depth is > 0.
class DepthMap {
 public:
  DepthMap() = default;
  /// Throws InvalidInputError on negative or non-finite values.
  DepthMap(ImageSize size, std::vector<double> values);

  ImageSize size() const { return grid_.size(); }
  int height() const { return grid_.height(); }
  int width() const { return grid_.width(); }
  double at(int row, int col) const { return grid_(row, col); }
  bool valid(int row, int col) const { return grid_(row, col) > 0.0; }
  std::span<const double> values() const { return grid_.values(); }

  BinaryMask validity() const;
  std::size_t valid_count() const;

 private:
  Grid<double> grid_;
};

/// Camera-frame point with a back-reference to the pixel it came from.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  PixelIndex source;

  Vec3 position() const { return {x, y, z}; }
};

struct PointCloud {
  std::vector<Point3> points;
  Intrinsics intrinsics;
  ImageSize image_size;
};

/// Half-open pixel rectangle [x_min, x_max) x [y_min, y_max).
struct PixelBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  bool empty() const { return x_max <= x_min || y_max <= y_min; }
  bool contains(int row, int col) const { return col >= x_min && col < x_max && row >= y_min && row < y_max; }
  PixelBox clipped(ImageSize size) const;
  /// Centre in pixel-index coordinates: ((x_min + x_max - 1) / 2, (y_min + y_max - 1) / 2).
  Point2 center() const;
  bool operator==(const PixelBox&) const = default;
};

/// Back-projects every valid pixel, row-major; zero-depth pixels are skipped.
PointCloud project_depth(const DepthMap& depth, const Intrinsics& k);

/// Camera-frame point for a (possibly fractional) pixel position at depth `z`.
Vec3 back_project(Point2 pixel, double z, const Intrinsics& k);

/// Pixel hit by a camera-frame point, rounded to nearest (ties to even).
/// Throws InvalidInputError when z <= 0.
PixelIndex project_to_pixel(const Vec3& p, const Intrinsics& k);

/// Sets the pixel of each point that lands inside `size`; others are dropped.
/// Throws InvalidInputError for any point with z <= 0.
BinaryMask reproject_points(std::span<const Point3> points, const Intrinsics& k, ImageSize size);

/// Mean valid depth inside `box` (clipped to the image). Throws DegenerateRegionError
/// when the clipped box holds no valid pixel.
double region_depth(const DepthMap& depth, const PixelBox& box);

/// d_f: mean valid depth of the head box.
inline double face_depth(const DepthMap& depth, const PixelBox& head_box) { return region_depth(depth, head_box); }

/// d_t: mean valid depth of the (2r+1) x (2r+1) window centred on `pixel`.
double target_depth(const DepthMap& depth, PixelIndex pixel, int radius = 2);

}  // namespace depthgaze
