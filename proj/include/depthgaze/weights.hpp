#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "depthgaze/fusion.hpp"

namespace depthgaze {

struct NamedTensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

// Flat little-endian tensor container:
//   "MMFW" | version u32 | count u32 |
//   count x { name_len u16 | name | rank u8 | dims u32[rank] | f32 payload row-major }
class WeightBundle {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void put(const std::string& name, NamedTensor tensor);
  const NamedTensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors_.contains(name); }
  const std::map<std::string, NamedTensor>& tensors() const { return tensors_; }

  /// Throws FormatError ("bad weight bundle: ...") on bad magic, version or truncation.
  static WeightBundle read(std::istream& in);
  static WeightBundle load(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::map<std::string, NamedTensor> tensors_;
};

/// Toy-scale shapes of the fusion network.
struct MmfConfig {
  int channels = 8;       // C of scene/depth features
  int face_channels = 8;  // C_f of the face embedding
  int pool_h = 4;
  int pool_w = 4;
  int embed_dim = 16;     // encoder output width
  ImageSize heatmap{64, 64};

  static constexpr int kSceneInputs = 4;  // RGB + head mask
  static constexpr int kDepthInputs = 2;  // depth + DISM
  static constexpr int kFaceInputs = 3;   // RGB crop

  void validate() const;
  bool operator==(const MmfConfig&) const = default;
};

struct MmfWeights {
  MmfConfig config;
  LinearProjection scene_backbone;  // per-cell 4 -> C
  LinearProjection depth_backbone;  // per-cell 2 -> C
  LinearProjection face_backbone;   // per-cell 3 -> C_f
  LinearProjection attn_scene;      // f_S: C_f + h*w -> h*w
  LinearProjection attn_mask;       // f_M: C_f + h*w -> h*w
  LinearProjection enc_scene;       // (C + C_f)*h*w -> E
  LinearProjection enc_depth;
  LinearProjection decoder;         // E -> H*W

  static MmfWeights random(const MmfConfig& config, std::uint64_t seed);
  /// Throws FormatError when tensors are missing or their shapes disagree.
  static MmfWeights from_bundle(const WeightBundle& bundle);
  WeightBundle to_bundle() const;
};

}  // namespace depthgaze
