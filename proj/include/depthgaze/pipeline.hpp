#pragma once

#include <optional>

#include "depthgaze/dism.hpp"
#include "depthgaze/fusion.hpp"
#include "depthgaze/weights.hpp"

namespace depthgaze {

struct PipelineInputs {
  /// 3 x H x W in [0,1]. Null means a black image.
  const Tensor3* image = nullptr;
  const DepthMap* depth = nullptr;
  PixelBox head_box;
  /// Pixel-space annotation driving the DISM pseudo-label.
  GazeAnnotation annotation;
  /// External DISM mask; when null the pseudo-label is generated.
  const BinaryMask* dism = nullptr;
};

struct PredictorConfig {
  Intrinsics intrinsics;
  DismParams dism;
  /// Unset selects the centroid baseline.
  std::optional<MmfWeights> weights;
  /// Baseline heatmap grid; the fusion path uses weights->config.heatmap.
  ImageSize heatmap{64, 64};
  double sigma = 3.0;
};

/// Intermediate tensors of one forward pass.
struct PipelineTrace {
  BinaryMask head_mask;
  std::vector<double> dism_pooled;  // e^S
  std::vector<double> head_pooled;  // e^M
  FeatureMap scene_features;        // e^I
  FeatureMap depth_features;        // e^D
  FaceEmbedding face;               // e^F
  AttentionMap attn_scene;          // attn^S
  AttentionMap attn_mask;           // attn^M
  FeatureMap scene_modulated;       // e^I*
  FeatureMap depth_modulated;       // e^D*
};

struct Prediction {
  Heatmap heatmap;
  Point2 point;  // normalized
  BinaryMask dism;
  bool empty_dism = false;
  bool fallback_center = false;
  std::optional<PipelineTrace> trace;
};

/// Binary mask of the head box.
BinaryMask head_mask(const PixelBox& box, ImageSize size);

/// Normalized centroid (mean col / W, mean row / H) of a non-empty mask.
std::optional<Point2> mask_centroid(const BinaryMask& mask);

/// Adaptive average pool to h x w followed by a per-cell linear map over channels.
FeatureMap pointwise_backbone(const Tensor3& input, const LinearProjection& proj, int h, int w);

/// GazeTargetDetection for one subject: DISM, then either the fusion dataflow or,
/// without weights, the DISM-centroid baseline (image centre when the mask is empty).
Prediction pipeline_predict(const PipelineInputs& inputs, const PredictorConfig& config);

}  // namespace depthgaze
