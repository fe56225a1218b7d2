#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depthgaze/grid.hpp"

namespace depthgaze {

class Rng;

/// C x h x w tensor, channel-major. Used for images and feature maps.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, double fill = 0.0);
  Tensor3(int channels, int height, int width, std::vector<double> values);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }

  double operator()(int c, int y, int x) const { return data_[index(c, y, x)]; }
  double& operator()(int c, int y, int x) { return data_[index(c, y, x)]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * static_cast<std::size_t>(width_) + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

using FeatureMap = Tensor3;

/// Spatially averaged face features, e^F.
struct FaceEmbedding {
  std::vector<double> values;
};

/// 1 x h x w softmax weights.
struct AttentionMap {
  int height = 0;
  int width = 0;
  std::vector<double> weights;

  double at(int y, int x) const { return weights[static_cast<std::size_t>(y) * width + x]; }
};

/// y = W x + b with W stored row-major (out x in).
class LinearProjection {
 public:
  LinearProjection() = default;
  LinearProjection(std::size_t out_dim, std::size_t in_dim);
  LinearProjection(std::size_t out_dim, std::size_t in_dim, std::vector<double> weight, std::vector<double> bias);

  /// Entries drawn uniformly from +-1/sqrt(in_dim), rounded to float precision so
  /// the projection survives a round trip through a weight bundle unchanged.
  static LinearProjection random(std::size_t out_dim, std::size_t in_dim, Rng& rng);

  std::size_t out_dim() const { return out_dim_; }
  std::size_t in_dim() const { return in_dim_; }
  double weight(std::size_t row, std::size_t col) const { return weight_[row * in_dim_ + col]; }
  double& weight(std::size_t row, std::size_t col) { return weight_[row * in_dim_ + col]; }
  std::span<const double> weights() const { return weight_; }
  std::span<const double> bias() const { return bias_; }
  std::span<double> bias() { return bias_; }

  /// Throws DimensionError when x.size() != in_dim().
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::size_t out_dim_ = 0;
  std::size_t in_dim_ = 0;
  std::vector<double> weight_;
  std::vector<double> bias_;
};

/// Adaptive max pooling to target_h x target_w, flattened row-major. Output cell i
/// covers input rows [floor(i*H/h), ceil((i+1)*H/h)).
std::vector<double> pool_flatten(const Grid<double>& m, int target_h, int target_w);
std::vector<double> pool_flatten(const BinaryMask& m, int target_h, int target_w);

/// Adaptive average pooling of every channel to target_h x target_w.
Tensor3 adaptive_avg_pool(const Tensor3& t, int target_h, int target_w);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// softmax(proj(face ++ aux)) reshaped to 1 x h x w.
AttentionMap attention_weights(const FaceEmbedding& face, std::span<const double> aux, const LinearProjection& proj,
                               int height, int width);

/// out[c,y,x] = features[c,y,x] * attn[y,x].
FeatureMap modulate(const FeatureMap& features, const AttentionMap& attn);

/// Channel-major flattening of features stacked on top of the face embedding
/// broadcast to every cell: ((C + C_f) x h x w).
std::vector<double> concat_face(const FeatureMap& features, const FaceEmbedding& face);

/// dec(enc_scene(scene ++ face) + enc_depth(depth ++ face)) reshaped to out_size.
Heatmap fuse(const FeatureMap& scene_mod, const FeatureMap& depth_mod, const FaceEmbedding& face,
             const LinearProjection& enc_scene, const LinearProjection& enc_depth, const LinearProjection& dec,
             ImageSize out_size);

}  // namespace depthgaze
