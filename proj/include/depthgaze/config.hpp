#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "depthgaze/dism.hpp"
#include "depthgaze/weights.hpp"

namespace depthgaze {

/// Settings shared by every command. Loaded from a flat `key = value` file;
/// command-line flags override individual keys.
struct RunConfig {
  /// Unset: Intrinsics::defaults_for(image size).
  std::optional<Intrinsics> intrinsics;
  DismParams dism;
  double sigma = 3.0;
  MmfConfig mmf;
  std::uint64_t seed = 0;
  std::string out_dir;
  double depth_scale = 1.0;
  std::string image_format = "png";
  int jobs = 0;

  /// Re-checks every constituent constraint; throws ConfigError.
  void validate() const;

  Intrinsics intrinsics_for(ImageSize size) const;

  /// Throws ConfigError on unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);

  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::filesystem::path& path);

  nlohmann::json to_json() const;
};

}  // namespace depthgaze
