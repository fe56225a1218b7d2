#include "depthgaze/pipeline.hpp"

#include "depthgaze/metrics.hpp"

namespace depthgaze {

BinaryMask head_mask(const PixelBox& box, ImageSize size) {
  BinaryMask m(size);
  const PixelBox clip = box.clipped(size);
  for (int a = clip.y_min; a < clip.y_max; ++a) {
    for (int b = clip.x_min; b < clip.x_max; ++b) m.set(a, b);
  }
  return m;
}

std::optional<Point2> mask_centroid(const BinaryMask& mask) {
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (int a = 0; a < mask.height(); ++a) {
    for (int b = 0; b < mask.width(); ++b) {
      if (mask.at(a, b)) {
        sx += b;
        sy += a;
        ++n;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return Point2{sx / static_cast<double>(n) / mask.width(), sy / static_cast<double>(n) / mask.height()};
}

FeatureMap pointwise_backbone(const Tensor3& input, const LinearProjection& proj, int h, int w) {
  if (proj.in_dim() != static_cast<std::size_t>(input.channels())) {
    throw DimensionError("backbone projection input must equal the input channel count");
  }
  const Tensor3 pooled = adaptive_avg_pool(input, h, w);
  FeatureMap out(static_cast<int>(proj.out_dim()), h, w);
  std::vector<double> cell(static_cast<std::size_t>(input.channels()));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < input.channels(); ++c) cell[c] = pooled(c, y, x);
      const std::vector<double> f = proj.apply(cell);
      for (int c = 0; c < out.channels(); ++c) out(c, y, x) = f[c];
    }
  }
  return out;
}

namespace {

Tensor3 stack(std::initializer_list<const Tensor3*> parts) {
  int channels = 0;
  std::vector<double> values;
  for (const Tensor3* p : parts) {
    channels += p->channels();
    values.insert(values.end(), p->values().begin(), p->values().end());
  }
  const Tensor3& first = **parts.begin();
  return Tensor3(channels, first.height(), first.width(), std::move(values));
}

Tensor3 plane(const Grid<double>& g) {
  return Tensor3(1, g.height(), g.width(), std::vector<double>(g.values().begin(), g.values().end()));
}

Tensor3 crop(const Tensor3& image, const PixelBox& box) {
  const PixelBox clip = box.clipped({image.height(), image.width()});
  if (clip.empty()) throw DegenerateRegionError("head box does not intersect the image");
  Tensor3 out(image.channels(), clip.y_max - clip.y_min, clip.x_max - clip.x_min);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = clip.y_min; y < clip.y_max; ++y) {
      for (int x = clip.x_min; x < clip.x_max; ++x) out(c, y - clip.y_min, x - clip.x_min) = image(c, y, x);
    }
  }
  return out;
}

Prediction mmf_forward(const PipelineInputs& in, const MmfWeights& w, BinaryMask dism) {
  const DepthMap& depth = *in.depth;
  const ImageSize size = depth.size();
  const MmfConfig& cfg = w.config;
  const int h = cfg.pool_h;
  const int wd = cfg.pool_w;

  const Tensor3 black(3, size.height, size.width);
  const Tensor3& image = in.image ? *in.image : black;
  if (image.channels() != 3 || image.height() != size.height || image.width() != size.width) {
    throw DimensionError("image must be 3 x H x W matching the depth map");
  }

  PipelineTrace t;
  t.head_mask = head_mask(in.head_box, size);
  const Heatmap head_plane = Heatmap::from_mask(t.head_mask);
  const Heatmap dism_plane = Heatmap::from_mask(dism);
  Grid<double> depth_grid(size, std::vector<double>(depth.values().begin(), depth.values().end()));

  const Tensor3 head_t = plane(head_plane);
  const Tensor3 dism_t = plane(dism_plane);
  const Tensor3 depth_t = plane(depth_grid);
  t.scene_features = pointwise_backbone(stack({&image, &head_t}), w.scene_backbone, h, wd);
  t.depth_features = pointwise_backbone(stack({&depth_t, &dism_t}), w.depth_backbone, h, wd);

  const FeatureMap face_map = pointwise_backbone(crop(image, in.head_box), w.face_backbone, h, wd);
  t.face.values.assign(static_cast<std::size_t>(face_map.channels()), 0.0);
  for (int c = 0; c < face_map.channels(); ++c) {
    double s = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < wd; ++x) s += face_map(c, y, x);
    }
    t.face.values[c] = s / (h * wd);
  }

  t.dism_pooled = pool_flatten(dism, h, wd);
  t.head_pooled = pool_flatten(t.head_mask, h, wd);
  t.attn_scene = attention_weights(t.face, t.dism_pooled, w.attn_scene, h, wd);
  t.attn_mask = attention_weights(t.face, t.head_pooled, w.attn_mask, h, wd);
  t.scene_modulated = modulate(t.scene_features, t.attn_scene);
  t.depth_modulated = modulate(t.depth_features, t.attn_mask);

  Prediction p;
  p.heatmap = fuse(t.scene_modulated, t.depth_modulated, t.face, w.enc_scene, w.enc_depth, w.decoder, cfg.heatmap);
  p.point = heatmap_argmax(p.heatmap);
  p.empty_dism = dism.count() == 0;
  p.dism = std::move(dism);
  p.trace = std::move(t);
  return p;
}

}  // namespace

Prediction pipeline_predict(const PipelineInputs& inputs, const PredictorConfig& config) {
  if (inputs.depth == nullptr) throw ArgumentError("pipeline_predict: depth map required");
  const DepthMap& depth = *inputs.depth;

  BinaryMask dism;
  if (inputs.dism != nullptr) {
    if (inputs.dism->size() != depth.size()) throw DimensionError("DISM mask size differs from the depth map");
    dism = *inputs.dism;
  } else {
    dism = generate_dism(depth, inputs.head_box, inputs.annotation, config.intrinsics, config.dism).mask;
  }

  if (config.weights) return mmf_forward(inputs, *config.weights, std::move(dism));

  Prediction p;
  const std::optional<Point2> centroid = mask_centroid(dism);
  p.empty_dism = !centroid;
  p.fallback_center = !centroid;
  p.point = centroid.value_or(Point2{0.5, 0.5});
  p.heatmap = gaussian_heatmap(p.point, config.heatmap, config.sigma);
  p.dism = std::move(dism);
  return p;
}

}  // namespace depthgaze
