#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "depthgaze/annotation.hpp"
#include "depthgaze/fusion.hpp"
#include "depthgaze/geometry.hpp"

namespace depthgaze {

/// Header line required at the top of annotation files.
inline constexpr const char* kAnnotationHeader =
    "image_path,img_w,img_h,box_x_min,box_y_min,box_x_max,box_y_max,eye_x,eye_y,gaze_x_norm,gaze_y_norm,in_frame";

/// Rows sharing (image_path, head box) merge into one record, emitted in order of first
/// appearance. Throws ParseError naming the line on malformed or out-of-range rows and
/// MergeConflictError when merged rows disagree on size, eye or in_frame.
std::vector<AnnotationRecord> parse_annotations(std::istream& in);
std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path);

/// Integer samples of a single- or three-channel raster, row-major, interleaved.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::uint32_t maxval = 255;  // 255 or 65535
  std::vector<std::uint16_t> samples;
};

/// PNG (8/16-bit gray, gray+alpha, RGB, RGBA; alpha dropped) or binary PGM/PPM (P5/P6).
Raster read_raster(const std::filesystem::path& path);
/// Format from the extension: .png, .pgm or .ppm.
void write_raster(const std::filesystem::path& path, const Raster& raster);

/// depth = sample * depth_scale; 0 is invalid.
DepthMap load_depth(const std::filesystem::path& path, double depth_scale);
/// 16-bit; throws InvalidInputError when a value does not fit after scaling.
void save_depth(const DepthMap& depth, const std::filesystem::path& path, double depth_scale);

/// 8-bit {0,255}. On load any nonzero sample is true.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

/// 16-bit raster plus `<path>.json` holding {"offset", "scale"}; value = offset + q/65535*scale.
/// For non-negative maps offset is 0 and scale is the peak value.
void save_heatmap(const Heatmap& heatmap, const std::filesystem::path& path);
/// Without a sidecar, value = q / maxval.
Heatmap load_heatmap(const std::filesystem::path& path);

/// 3 x H x W in [0,1]; gray rasters are replicated to three channels.
Tensor3 load_image(const std::filesystem::path& path);

}  // namespace depthgaze
