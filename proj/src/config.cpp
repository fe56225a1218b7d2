#include "depthgaze/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace depthgaze {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

int to_small_int(const std::string& key, const std::string& v) {
  const long long n = to_int(key, v);
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": value out of range");
  }
  return static_cast<int>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::optional<double> to_auto_or_double(const std::string& key, const std::string& v) {
  if (v == "auto" || v == "to-scene-extent" || v == "default") return std::nullopt;
  return to_double(key, v);
}

Intrinsics& partial_intrinsics(std::optional<Intrinsics>& k) {
  if (!k) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    k = Intrinsics{nan, nan, nan, nan};
  }
  return *k;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  if (key == "intrinsics") {
    if (v != "default") throw ConfigError("intrinsics: only 'default' is accepted; use fx/fy/cx/cy");
    intrinsics.reset();
  } else if (key == "fx") {
    partial_intrinsics(intrinsics).fx = to_double(key, v);
  } else if (key == "fy") {
    partial_intrinsics(intrinsics).fy = to_double(key, v);
  } else if (key == "cx") {
    partial_intrinsics(intrinsics).cx = to_double(key, v);
  } else if (key == "cy") {
    partial_intrinsics(intrinsics).cy = to_double(key, v);
  } else if (key == "gamma1") {
    dism.thresholds.gamma1 = to_double(key, v);
  } else if (key == "gamma2") {
    dism.thresholds.gamma2 = to_double(key, v);
  } else if (key == "cuboid_length") {
    dism.cuboid_length = to_auto_or_double(key, v);
  } else if (key == "cuboid_half_width") {
    dism.cuboid_half_width = to_auto_or_double(key, v);
  } else if (key == "cuboid_half_height") {
    dism.cuboid_half_height = to_auto_or_double(key, v);
  } else if (key == "cross_section_ratio") {
    dism.cross_section_ratio = to_double(key, v);
  } else if (key == "head_exclusion") {
    dism.head_exclusion = to_bool(key, v);
  } else if (key == "target_window_radius") {
    dism.target_window_radius = to_small_int(key, v);
  } else if (key == "sigma") {
    sigma = to_double(key, v);
  } else if (key == "heatmap_width") {
    mmf.heatmap.width = to_small_int(key, v);
  } else if (key == "heatmap_height") {
    mmf.heatmap.height = to_small_int(key, v);
  } else if (key == "pool_h") {
    mmf.pool_h = to_small_int(key, v);
  } else if (key == "pool_w") {
    mmf.pool_w = to_small_int(key, v);
  } else if (key == "channels") {
    mmf.channels = to_small_int(key, v);
  } else if (key == "face_channels") {
    mmf.face_channels = to_small_int(key, v);
  } else if (key == "embed_dim") {
    mmf.embed_dim = to_small_int(key, v);
  } else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "out_dir") {
    out_dir = v;
  } else if (key == "depth_scale") {
    depth_scale = to_double(key, v);
  } else if (key == "image_format") {
    image_format = v;
  } else if (key == "jobs") {
    jobs = to_small_int(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  dism.validate();
  mmf.validate();
  if (intrinsics) {
    const Intrinsics& k = *intrinsics;
    if (std::isnan(k.fx) || std::isnan(k.fy) || std::isnan(k.cx) || std::isnan(k.cy)) {
      throw ConfigError("explicit intrinsics need all of fx, fy, cx, cy");
    }
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) throw ConfigError("focal lengths must be positive");
  }
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(depth_scale > 0.0)) throw ConfigError("depth_scale must be positive");
  if (image_format != "png" && image_format != "pgm") throw ConfigError("image_format must be png or pgm");
  if (jobs < 0) throw ConfigError("jobs must be non-negative");
}

Intrinsics RunConfig::intrinsics_for(ImageSize size) const {
  const Intrinsics k = intrinsics.value_or(Intrinsics::defaults_for(size));
  k.validate(size);
  return k;
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse(in);
}

nlohmann::json RunConfig::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json("auto"); };
  nlohmann::json j;
  if (intrinsics) {
    j["intrinsics"] = {{"fx", intrinsics->fx}, {"fy", intrinsics->fy}, {"cx", intrinsics->cx}, {"cy", intrinsics->cy}};
  } else {
    j["intrinsics"] = "default";
  }
  j["gamma1"] = dism.thresholds.gamma1;
  j["gamma2"] = dism.thresholds.gamma2;
  j["cuboid_length"] = opt(dism.cuboid_length);
  j["cuboid_half_width"] = opt(dism.cuboid_half_width);
  j["cuboid_half_height"] = opt(dism.cuboid_half_height);
  j["cross_section_ratio"] = dism.cross_section_ratio;
  j["head_exclusion"] = dism.head_exclusion;
  j["target_window_radius"] = dism.target_window_radius;
  j["sigma"] = sigma;
  j["heatmap"] = {mmf.heatmap.height, mmf.heatmap.width};
  j["pool"] = {mmf.pool_h, mmf.pool_w};
  j["seed"] = seed;
  j["depth_scale"] = depth_scale;
  j["image_format"] = image_format;
  return j;
}

}  // namespace depthgaze
