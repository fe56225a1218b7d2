#include "depthgaze/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthgaze/parallel.hpp"
#include "depthgaze/random.hpp"

namespace depthgaze {
namespace {

int window_begin(int i, int in, int out) { return static_cast<int>((static_cast<long long>(i) * in) / out); }
int window_end(int i, int in, int out) {
  return static_cast<int>((static_cast<long long>(i + 1) * in + out - 1) / out);
}

void check_dims(int c, int h, int w) {
  if (c <= 0 || h <= 0 || w <= 0) throw DimensionError("tensor dimensions must be positive");
}

}  // namespace

Tensor3::Tensor3(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

Tensor3::Tensor3(int channels, int height, int width, std::vector<double> values)
    : channels_(channels), height_(height), width_(width), data_(std::move(values)) {
  check_dims(channels, height, width);
  if (data_.size() != static_cast<std::size_t>(channels) * height * width) {
    throw DimensionError("tensor value count does not match C * h * w");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw InvalidInputError("tensor value is not finite");
  }
}

LinearProjection::LinearProjection(std::size_t out_dim, std::size_t in_dim)
    : out_dim_(out_dim), in_dim_(in_dim), weight_(out_dim * in_dim, 0.0), bias_(out_dim, 0.0) {}

LinearProjection::LinearProjection(std::size_t out_dim, std::size_t in_dim, std::vector<double> weight,
                                   std::vector<double> bias)
    : out_dim_(out_dim), in_dim_(in_dim), weight_(std::move(weight)), bias_(std::move(bias)) {
  if (weight_.size() != out_dim * in_dim || bias_.size() != out_dim) {
    throw DimensionError("linear projection: weight/bias sizes do not match out x in");
  }
}

LinearProjection LinearProjection::random(std::size_t out_dim, std::size_t in_dim, Rng& rng) {
  LinearProjection p(out_dim, in_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(in_dim, 1)));
  auto draw = [&] { return static_cast<double>(static_cast<float>(rng.uniform(-bound, bound))); };
  for (double& v : p.weight_) v = draw();
  for (double& v : p.bias_) v = draw();
  return p;
}

std::vector<double> LinearProjection::apply(std::span<const double> x) const {
  if (x.size() != in_dim_) {
    throw DimensionError("linear projection expects input of size " + std::to_string(in_dim_) + ", got " +
                         std::to_string(x.size()));
  }
  std::vector<double> y(out_dim_);
  const auto rows = static_cast<std::ptrdiff_t>(out_dim_);
  // Each output is one serial dot product, so results do not depend on the team size.
#pragma omp parallel for schedule(static) if (out_dim_ * in_dim_ > 16384)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const double* w = weight_.data() + static_cast<std::size_t>(r) * in_dim_;
    double acc = bias_[r];
    for (std::size_t c = 0; c < in_dim_; ++c) acc += w[c] * x[c];
    y[r] = acc;
  }
  return y;
}

std::vector<double> pool_flatten(const Grid<double>& m, int target_h, int target_w) {
  if (target_h <= 0 || target_w <= 0 || m.height() <= 0 || m.width() <= 0) {
    throw DimensionError("pool_flatten: dimensions must be positive");
  }
  std::vector<double> out(static_cast<std::size_t>(target_h) * target_w);
  for (int i = 0; i < target_h; ++i) {
    const int r0 = window_begin(i, m.height(), target_h);
    const int r1 = window_end(i, m.height(), target_h);
    for (int j = 0; j < target_w; ++j) {
      const int c0 = window_begin(j, m.width(), target_w);
      const int c1 = window_end(j, m.width(), target_w);
      double best = -std::numeric_limits<double>::infinity();
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) best = std::max(best, m(r, c));
      }
      out[static_cast<std::size_t>(i) * target_w + j] = best;
    }
  }
  return out;
}

std::vector<double> pool_flatten(const BinaryMask& m, int target_h, int target_w) {
  return pool_flatten(Heatmap::from_mask(m), target_h, target_w);
}

Tensor3 adaptive_avg_pool(const Tensor3& t, int target_h, int target_w) {
  Tensor3 out(t.channels(), target_h, target_w);
  for (int c = 0; c < t.channels(); ++c) {
    for (int i = 0; i < target_h; ++i) {
      const int r0 = window_begin(i, t.height(), target_h);
      const int r1 = window_end(i, t.height(), target_h);
      for (int j = 0; j < target_w; ++j) {
        const int c0 = window_begin(j, t.width(), target_w);
        const int c1 = window_end(j, t.width(), target_w);
        double sum = 0.0;
        for (int r = r0; r < r1; ++r) {
          for (int col = c0; col < c1; ++col) sum += t(c, r, col);
        }
        out(c, i, j) = sum / static_cast<double>((r1 - r0) * (c1 - c0));
      }
    }
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

AttentionMap attention_weights(const FaceEmbedding& face, std::span<const double> aux, const LinearProjection& proj,
                               int height, int width) {
  if (height <= 0 || width <= 0) throw DimensionError("attention map dimensions must be positive");
  if (proj.in_dim() != face.values.size() + aux.size()) {
    throw DimensionError("attention projection input must equal |face| + |aux|");
  }
  if (proj.out_dim() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("attention projection output must equal h * w");
  }
  std::vector<double> joined(face.values.begin(), face.values.end());
  joined.insert(joined.end(), aux.begin(), aux.end());
  return {height, width, softmax(proj.apply(joined))};
}

FeatureMap modulate(const FeatureMap& features, const AttentionMap& attn) {
  if (features.height() != attn.height || features.width() != attn.width) {
    throw DimensionError("modulate: feature and attention spatial sizes differ");
  }
  FeatureMap out = features;
  for (int c = 0; c < out.channels(); ++c) {
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) out(c, y, x) *= attn.at(y, x);
    }
  }
  return out;
}

std::vector<double> concat_face(const FeatureMap& features, const FaceEmbedding& face) {
  const std::size_t cells = static_cast<std::size_t>(features.height()) * features.width();
  std::vector<double> out(features.values().begin(), features.values().end());
  out.reserve(out.size() + face.values.size() * cells);
  for (double f : face.values) out.insert(out.end(), cells, f);
  return out;
}

Heatmap fuse(const FeatureMap& scene_mod, const FeatureMap& depth_mod, const FaceEmbedding& face,
             const LinearProjection& enc_scene, const LinearProjection& enc_depth, const LinearProjection& dec,
             ImageSize out_size) {
  if (enc_scene.out_dim() != enc_depth.out_dim() || dec.in_dim() != enc_scene.out_dim()) {
    throw DimensionError("fuse: encoder outputs and decoder input disagree");
  }
  if (dec.out_dim() != out_size.area()) throw DimensionError("fuse: decoder output must equal H * W");
  const std::vector<double> s = enc_scene.apply(concat_face(scene_mod, face));
  const std::vector<double> d = enc_depth.apply(concat_face(depth_mod, face));
  std::vector<double> sum(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) sum[i] = s[i] + d[i];
  return Heatmap(out_size, dec.apply(sum));
}

}  // namespace depthgaze
