#include "depthgaze/io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace depthgaze {
namespace {

// ---------------------------------------------------------------------------
// Annotation CSV

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::size_t line, const char* field) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, std::string(field) + " is not an integer: '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s, std::size_t line, const char* field) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw ParseError(line, std::string(field) + " is not a number: '" + std::string(s) + "'");
  }
  return v;
}

using MergeKey = std::tuple<std::string, int, int, int, int>;

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::istream& in) {
  std::vector<AnnotationRecord> records;
  std::map<MergeKey, std::size_t> index;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kAnnotationHeader) throw ParseError(line_no, "missing or malformed header");
      header_seen = true;
      continue;
    }

    const auto f = split(line, ',');
    if (f.size() != 12) throw ParseError(line_no, "expected 12 fields, got " + std::to_string(f.size()));

    AnnotationRecord r;
    r.source_line = line_no;
    r.image_path = std::string(trim(f[0]));
    if (r.image_path.empty()) throw ParseError(line_no, "empty image_path");
    r.image_size.width = parse_int(f[1], line_no, "img_w");
    r.image_size.height = parse_int(f[2], line_no, "img_h");
    r.head_box = {parse_int(f[3], line_no, "box_x_min"), parse_int(f[4], line_no, "box_y_min"),
                  parse_int(f[5], line_no, "box_x_max"), parse_int(f[6], line_no, "box_y_max")};
    r.eye = {static_cast<double>(parse_int(f[7], line_no, "eye_x")),
             static_cast<double>(parse_int(f[8], line_no, "eye_y"))};
    const Point2 gaze{parse_double(f[9], line_no, "gaze_x_norm"), parse_double(f[10], line_no, "gaze_y_norm")};
    const int in_frame = parse_int(f[11], line_no, "in_frame");

    if (r.image_size.width <= 0 || r.image_size.height <= 0) throw ParseError(line_no, "image size must be positive");
    const PixelBox& b = r.head_box;
    if (b.empty()) throw ParseError(line_no, "head box is degenerate");
    if (b.x_min < 0 || b.y_min < 0 || b.x_max > r.image_size.width || b.y_max > r.image_size.height) {
      throw ParseError(line_no, "head box outside the image");
    }
    if (!r.image_size.contains(static_cast<int>(r.eye.y), static_cast<int>(r.eye.x))) {
      throw ParseError(line_no, "eye outside the image");
    }
    if (in_frame != 0 && in_frame != 1) throw ParseError(line_no, "in_frame must be 0 or 1");
    r.in_frame = in_frame == 1;
    if (r.in_frame && !(gaze.x >= 0.0 && gaze.x <= 1.0 && gaze.y >= 0.0 && gaze.y <= 1.0)) {
      throw ParseError(line_no, "normalized gaze point outside [0,1]");
    }
    r.gaze_points.push_back(gaze);

    const MergeKey key{r.image_path, b.x_min, b.y_min, b.x_max, b.y_max};
    const auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, records.size());
      records.push_back(std::move(r));
      continue;
    }
    AnnotationRecord& existing = records[it->second];
    if (existing.image_size != r.image_size || existing.eye != r.eye || existing.in_frame != r.in_frame) {
      throw MergeConflictError(line_no, "row conflicts with line " + std::to_string(existing.source_line) +
                                            " for the same image and head box");
    }
    if (existing.gaze_points.size() >= 10) throw ParseError(line_no, "more than 10 annotations for one subject");
    existing.gaze_points.push_back(gaze);
  }
  if (!header_seen) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  return records;
}

std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_annotations(in);
}

// ---------------------------------------------------------------------------
// Rasters

namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::string read_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) break;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return tok;
}

Raster read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = read_token(in);
  Raster r;
  if (magic == "P5") {
    r.channels = 1;
  } else if (magic == "P6") {
    r.channels = 3;
  } else {
    throw FormatError(path.string() + ": not a binary PGM/PPM");
  }
  try {
    r.width = std::stoi(read_token(in));
    r.height = std::stoi(read_token(in));
    r.maxval = static_cast<std::uint32_t>(std::stoul(read_token(in)));
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed header");
  }
  if (r.width <= 0 || r.height <= 0 || r.maxval == 0 || r.maxval > 65535) {
    throw FormatError(path.string() + ": unsupported dimensions or maxval");
  }
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height * r.channels;
  const std::size_t bytes = r.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(n * bytes);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw FormatError(path.string() + ": truncated pixel data");
  }
  r.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.samples[i] = bytes == 2 ? static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]) : buf[i];
    if (r.samples[i] > r.maxval) throw FormatError(path.string() + ": sample exceeds maxval");
  }
  return r;
}

void write_netpbm(const std::filesystem::path& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (r.channels == 3 ? "P6" : "P5") << '\n' << r.width << ' ' << r.height << '\n' << r.maxval << '\n';
  const bool wide = r.maxval > 255;
  std::vector<char> buf;
  buf.reserve(r.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t s : r.samples) {
    if (wide) buf.push_back(static_cast<char>(s >> 8));
    buf.push_back(static_cast<char>(s & 0xFF));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp; these helpers keep only trivially
// destructible state between setjmp and the calls that may jump.
bool png_read_rows(std::FILE* fp, Raster& r, std::vector<unsigned char>& data, std::string& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) {
    err = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    err = "corrupt or truncated PNG";
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  r.width = static_cast<int>(png_get_image_width(png, info));
  r.height = static_cast<int>(png_get_image_height(png, info));
  r.channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  r.maxval = out_depth == 16 ? 65535 : 255;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  data.resize(rowbytes * static_cast<std::size_t>(r.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(r.height));
  for (int y = 0; y < r.height; ++y) rows[y] = data.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool png_write_rows(std::FILE* fp, const Raster& r, std::vector<unsigned char>& data, std::string& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) {
    err = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    err = "PNG encoding failed";
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(r.width), static_cast<png_uint_32>(r.height),
               r.maxval > 255 ? 16 : 8, r.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t rowbytes = data.size() / static_cast<std::size_t>(r.height);
  for (int y = 0; y < r.height; ++y) png_write_row(png, data.data() + rowbytes * y);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

Raster read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  Raster r;
  std::vector<unsigned char> data;
  std::string err;
  if (!png_read_rows(fp.get(), r, data, err)) throw FormatError(path.string() + ": " + err);
  if (r.channels != 1 && r.channels != 3) throw FormatError(path.string() + ": unsupported channel layout");
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height * r.channels;
  r.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.samples[i] = r.maxval > 255 ? static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]) : data[i];
  }
  return r;
}

void write_png(const std::filesystem::path& path, const Raster& r) {
  const bool wide = r.maxval > 255;
  std::vector<unsigned char> data;
  data.reserve(r.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t s : r.samples) {
    if (wide) data.push_back(static_cast<unsigned char>(s >> 8));
    data.push_back(static_cast<unsigned char>(s & 0xFF));
  }
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());
  std::string err;
  if (!png_write_rows(fp.get(), r, data, err)) throw IoError(path.string() + ": " + err);
}

void check_raster(const Raster& r) {
  if (r.width <= 0 || r.height <= 0) throw DimensionError("raster dimensions must be positive");
  if (r.channels != 1 && r.channels != 3) throw ArgumentError("raster must have 1 or 3 channels");
  if (r.maxval != 255 && r.maxval != 65535) throw ArgumentError("raster maxval must be 255 or 65535");
  if (r.samples.size() != static_cast<std::size_t>(r.width) * r.height * r.channels) {
    throw DimensionError("raster sample count does not match its dimensions");
  }
}

Raster read_gray(const std::filesystem::path& path) {
  Raster r = read_raster(path);
  if (r.channels != 1) throw FormatError(path.string() + ": expected a single-channel image");
  return r;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

Raster read_raster(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm") return read_netpbm(path);
  throw FormatError(path.string() + ": unsupported format '" + ext + "'");
}

void write_raster(const std::filesystem::path& path, const Raster& raster) {
  check_raster(raster);
  const std::string ext = lower_ext(path);
  if (ext == ".png") return write_png(path, raster);
  if (ext == ".pgm" || ext == ".ppm") return write_netpbm(path, raster);
  throw FormatError(path.string() + ": unsupported format '" + ext + "'");
}

DepthMap load_depth(const std::filesystem::path& path, double depth_scale) {
  if (!(depth_scale > 0.0)) throw ConfigError("depth_scale must be positive");
  const Raster r = read_gray(path);
  std::vector<double> values(r.samples.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = r.samples[i] * depth_scale;
  return DepthMap({r.height, r.width}, std::move(values));
}

void save_depth(const DepthMap& depth, const std::filesystem::path& path, double depth_scale) {
  if (!(depth_scale > 0.0)) throw ConfigError("depth_scale must be positive");
  Raster r{depth.width(), depth.height(), 1, 65535, {}};
  r.samples.reserve(depth.values().size());
  for (double d : depth.values()) {
    const double q = std::nearbyint(d / depth_scale);
    if (q > 65535.0) throw InvalidInputError("depth value does not fit 16 bits at this depth_scale");
    r.samples.push_back(static_cast<std::uint16_t>(q));
  }
  write_raster(path, r);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  Raster r{mask.width(), mask.height(), 1, 255, {}};
  r.samples.reserve(mask.area());
  for (std::uint8_t b : mask.values()) r.samples.push_back(b ? 255 : 0);
  write_raster(path, r);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const Raster r = read_gray(path);
  BinaryMask m({r.height, r.width});
  auto bits = m.values();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = r.samples[i] != 0 ? 1 : 0;
  return m;
}

void save_heatmap(const Heatmap& heatmap, const std::filesystem::path& path) {
  const auto v = heatmap.values();
  if (v.empty()) throw DimensionError("cannot save an empty heatmap");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double offset = std::min(0.0, *lo);
  const double scale = *hi - offset;
  Raster r{heatmap.width(), heatmap.height(), 1, 65535, {}};
  r.samples.reserve(v.size());
  for (double x : v) {
    const double q = scale > 0.0 ? std::nearbyint((x - offset) / scale * 65535.0) : 0.0;
    r.samples.push_back(static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0)));
  }
  write_raster(path, r);

  const nlohmann::json side{{"offset", offset}, {"scale", scale}};
  std::ofstream out(sidecar_path(path));
  if (!out) throw IoError("cannot write " + sidecar_path(path).string());
  out << side.dump(2) << '\n';
}

Heatmap load_heatmap(const std::filesystem::path& path) {
  const Raster r = read_gray(path);
  double offset = 0.0;
  double scale = 1.0;
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream in(side);
    try {
      const nlohmann::json j = nlohmann::json::parse(in);
      offset = j.at("offset").get<double>();
      scale = j.at("scale").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(side.string() + ": " + e.what());
    }
  }
  std::vector<double> values(r.samples.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = offset + r.samples[i] / double(r.maxval) * scale;
  return Heatmap({r.height, r.width}, std::move(values));
}

Tensor3 load_image(const std::filesystem::path& path) {
  const Raster r = read_raster(path);
  Tensor3 t(3, r.height, r.width);
  const double inv = 1.0 / r.maxval;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * r.width + x) * r.channels;
      for (int c = 0; c < 3; ++c) t(c, y, x) = r.samples[base + (r.channels == 3 ? c : 0)] * inv;
    }
  }
  return t;
}

}  // namespace depthgaze
