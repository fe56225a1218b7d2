#include "depthgaze/weights.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "depthgaze/errors.hpp"
#include "depthgaze/random.hpp"

namespace depthgaze {
namespace {

constexpr std::array<char, 4> kMagic{'M', 'M', 'F', 'W'};
constexpr std::size_t kMaxElements = std::size_t{1} << 28;

[[noreturn]] void bad(const std::string& why) { throw FormatError("bad weight bundle: " + why); }

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::uint32_t, T>>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) bad("truncated");
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::uint32_t, T>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(static_cast<U>(bytes[i]) << (8 * i));
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

NamedTensor tensor_of(const LinearProjection& p, bool bias) {
  NamedTensor t;
  if (bias) {
    t.dims = {static_cast<std::uint32_t>(p.out_dim())};
    for (double v : p.bias()) t.data.push_back(static_cast<float>(v));
  } else {
    t.dims = {static_cast<std::uint32_t>(p.out_dim()), static_cast<std::uint32_t>(p.in_dim())};
    for (double v : p.weights()) t.data.push_back(static_cast<float>(v));
  }
  return t;
}

LinearProjection projection_of(const WeightBundle& b, const std::string& name, std::size_t out, std::size_t in) {
  if (!b.contains(name + ".weight") || !b.contains(name + ".bias")) bad("missing tensor " + name);
  const NamedTensor& w = b.get(name + ".weight");
  const NamedTensor& bias = b.get(name + ".bias");
  if (w.dims != std::vector<std::uint32_t>{static_cast<std::uint32_t>(out), static_cast<std::uint32_t>(in)} ||
      bias.dims != std::vector<std::uint32_t>{static_cast<std::uint32_t>(out)}) {
    bad("tensor " + name + " has shape inconsistent with the network config");
  }
  return LinearProjection(out, in, std::vector<double>(w.data.begin(), w.data.end()),
                          std::vector<double>(bias.data.begin(), bias.data.end()));
}

}  // namespace

void WeightBundle::put(const std::string& name, NamedTensor tensor) {
  std::size_t n = 1;
  for (auto d : tensor.dims) n *= d;
  if (n != tensor.data.size()) throw DimensionError("tensor " + name + ": payload does not match dims");
  if (name.size() > 0xFFFF) throw ArgumentError("tensor name too long");
  tensors_[name] = std::move(tensor);
}

const NamedTensor& WeightBundle::get(const std::string& name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) bad("missing tensor " + name);
  return it->second;
}

WeightBundle WeightBundle::read(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) bad("magic is not MMFW");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) bad("unsupported version " + std::to_string(version));
  const auto count = get_le<std::uint32_t>(in);
  WeightBundle bundle;
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto name_len = get_le<std::uint16_t>(in);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) bad("truncated");
    const auto rank = get_le<std::uint8_t>(in);
    NamedTensor tensor;
    std::size_t n = 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
      tensor.dims.push_back(get_le<std::uint32_t>(in));
      n *= tensor.dims.back();
      if (n > kMaxElements) bad("tensor " + name + " is implausibly large");
    }
    tensor.data.resize(n);
    for (float& v : tensor.data) v = get_le<float>(in);
    if (bundle.contains(name)) bad("duplicate tensor " + name);
    bundle.tensors_[name] = std::move(tensor);
  }
  return bundle;
}

WeightBundle WeightBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read(in);
}

void WeightBundle::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& [name, tensor] : tensors_) {
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.dims.size()));
    for (auto d : tensor.dims) put_le<std::uint32_t>(out, d);
    for (float v : tensor.data) put_le<float>(out, v);
  }
}

void WeightBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write(out);
  if (!out) throw IoError("failed writing " + path.string());
}

void MmfConfig::validate() const {
  if (channels <= 0 || face_channels <= 0 || pool_h <= 0 || pool_w <= 0 || embed_dim <= 0 || heatmap.height <= 0 ||
      heatmap.width <= 0) {
    throw ConfigError("fusion network dimensions must be positive");
  }
}

MmfWeights MmfWeights::random(const MmfConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const std::size_t cells = static_cast<std::size_t>(config.pool_h) * config.pool_w;
  const auto c = static_cast<std::size_t>(config.channels);
  const auto cf = static_cast<std::size_t>(config.face_channels);
  const auto e = static_cast<std::size_t>(config.embed_dim);
  MmfWeights w;
  w.config = config;
  w.scene_backbone = LinearProjection::random(c, MmfConfig::kSceneInputs, rng);
  w.depth_backbone = LinearProjection::random(c, MmfConfig::kDepthInputs, rng);
  w.face_backbone = LinearProjection::random(cf, MmfConfig::kFaceInputs, rng);
  w.attn_scene = LinearProjection::random(cells, cf + cells, rng);
  w.attn_mask = LinearProjection::random(cells, cf + cells, rng);
  w.enc_scene = LinearProjection::random(e, (c + cf) * cells, rng);
  w.enc_depth = LinearProjection::random(e, (c + cf) * cells, rng);
  w.decoder = LinearProjection::random(config.heatmap.area(), e, rng);
  return w;
}

WeightBundle MmfWeights::to_bundle() const {
  WeightBundle b;
  b.put("config", {{4},
                   {static_cast<float>(config.pool_h), static_cast<float>(config.pool_w),
                    static_cast<float>(config.heatmap.height), static_cast<float>(config.heatmap.width)}});
  const std::pair<const char*, const LinearProjection*> parts[] = {
      {"scene_backbone", &scene_backbone}, {"depth_backbone", &depth_backbone}, {"face_backbone", &face_backbone},
      {"attn_scene", &attn_scene},         {"attn_mask", &attn_mask},           {"enc_scene", &enc_scene},
      {"enc_depth", &enc_depth},           {"decoder", &decoder}};
  for (const auto& [name, proj] : parts) {
    b.put(std::string(name) + ".weight", tensor_of(*proj, false));
    b.put(std::string(name) + ".bias", tensor_of(*proj, true));
  }
  return b;
}

MmfWeights MmfWeights::from_bundle(const WeightBundle& bundle) {
  const NamedTensor& meta = bundle.get("config");
  if (meta.dims != std::vector<std::uint32_t>{4}) bad("config tensor must hold 4 values");
  auto as_int = [](float v) {
    if (!(v >= 1.0f && v <= 65536.0f) || v != static_cast<float>(static_cast<int>(v))) bad("config value out of range");
    return static_cast<int>(v);
  };
  auto dim = [&](const std::string& name, std::size_t axis) -> int {
    const NamedTensor& t = bundle.get(name);
    if (t.dims.size() != 2) bad("tensor " + name + " must be rank 2");
    return static_cast<int>(t.dims[axis]);
  };

  MmfConfig cfg;
  cfg.pool_h = as_int(meta.data[0]);
  cfg.pool_w = as_int(meta.data[1]);
  cfg.heatmap = {as_int(meta.data[2]), as_int(meta.data[3])};
  cfg.channels = dim("scene_backbone.weight", 0);
  cfg.face_channels = dim("face_backbone.weight", 0);
  cfg.embed_dim = dim("enc_scene.weight", 0);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    bad(e.what());
  }

  const std::size_t cells = static_cast<std::size_t>(cfg.pool_h) * cfg.pool_w;
  const auto c = static_cast<std::size_t>(cfg.channels);
  const auto cf = static_cast<std::size_t>(cfg.face_channels);
  const auto e = static_cast<std::size_t>(cfg.embed_dim);
  MmfWeights w;
  w.config = cfg;
  w.scene_backbone = projection_of(bundle, "scene_backbone", c, MmfConfig::kSceneInputs);
  w.depth_backbone = projection_of(bundle, "depth_backbone", c, MmfConfig::kDepthInputs);
  w.face_backbone = projection_of(bundle, "face_backbone", cf, MmfConfig::kFaceInputs);
  w.attn_scene = projection_of(bundle, "attn_scene", cells, cf + cells);
  w.attn_mask = projection_of(bundle, "attn_mask", cells, cf + cells);
  w.enc_scene = projection_of(bundle, "enc_scene", e, (c + cf) * cells);
  w.enc_depth = projection_of(bundle, "enc_depth", e, (c + cf) * cells);
  w.decoder = projection_of(bundle, "decoder", cfg.heatmap.area(), e);
  return w;
}

}  // namespace depthgaze
