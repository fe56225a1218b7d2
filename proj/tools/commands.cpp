#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "depthgaze/config.hpp"
#include "depthgaze/dism.hpp"
#include "depthgaze/io.hpp"
#include "depthgaze/metrics.hpp"
#include "depthgaze/parallel.hpp"
#include "depthgaze/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace depthgaze::cli {
namespace {

/// Exit-code carrying failure for the command layer.
struct CommandError : std::runtime_error {
  CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

struct CommonFlags {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> depth_scale;
  std::optional<double> sigma;
  std::optional<double> gamma1;
  std::optional<double> gamma2;
};

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw CommandError(kExitUsage, "config file not found: " + f.config);
    cfg = RunConfig::load(f.config);
  }
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.seed) cfg.seed = *f.seed;
  if (f.depth_scale) cfg.depth_scale = *f.depth_scale;
  if (f.sigma) cfg.sigma = *f.sigma;
  if (f.gamma1) cfg.dism.thresholds.gamma1 = *f.gamma1;
  if (f.gamma2) cfg.dism.thresholds.gamma2 = *f.gamma2;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration (key = value)");
  cmd->add_option("--out-dir", f.out_dir, "Output directory");
  cmd->add_option("--jobs", f.jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "Seed for generated weights");
  cmd->add_option("--depth-scale", f.depth_scale, "Depth units per stored sample");
  cmd->add_option("--sigma", f.sigma, "Ground-truth Gaussian sigma in heatmap pixels");
  cmd->add_option("--gamma1", f.gamma1, "Same-plane depth threshold");
  cmd->add_option("--gamma2", f.gamma2, "Intermediate depth threshold");
}

fs::path output_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CommandError(kExitUsage, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::vector<AnnotationRecord> read_annotations(const std::string& path) {
  if (!fs::exists(path)) throw CommandError(kExitUsage, "annotation file not found: " + path);
  return parse_annotations(fs::path(path));
}

/// Depth file for a record: `--depth` itself when it is a file, otherwise
/// `<dir>/<image-stem>.png` or `.pgm`.
fs::path depth_path_for(const fs::path& depth_arg, const AnnotationRecord& r) {
  if (!fs::is_directory(depth_arg)) return depth_arg;
  const std::string stem = image_stem(r.image_path);
  for (const char* ext : {".png", ".pgm"}) {
    const fs::path p = depth_arg / (stem + ext);
    if (fs::exists(p)) return p;
  }
  throw IoError("no depth map for " + r.image_path + " in " + depth_arg.string());
}

void require_path(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw CommandError(kExitUsage, std::string(what) + " not found: " + path);
}

DepthMap load_record_depth(const fs::path& depth_arg, const AnnotationRecord& r, double depth_scale) {
  DepthMap depth = load_depth(depth_path_for(depth_arg, r), depth_scale);
  if (depth.size() != r.image_size) {
    throw DimensionError("depth map is " + std::to_string(depth.width()) + "x" + std::to_string(depth.height()) +
                         " but the annotation declares " + std::to_string(r.image_size.width) + "x" +
                         std::to_string(r.image_size.height));
  }
  return depth;
}

std::string record_name(const AnnotationRecord& r, std::size_t index, const char* suffix, const std::string& ext) {
  return image_stem(r.image_path) + "_" + std::to_string(index) + "_" + suffix + "." + ext;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------

int cmd_project(const CommonFlags& flags, const std::string& depth_file, const std::string& out_file,
                std::ostream& out, std::ostream& err) {
  require_path(depth_file, "depth file");
  const RunConfig cfg = resolve_config(flags);
  parallel::ThreadGuard threads(cfg.jobs);
  const DepthMap depth = load_depth(depth_file, cfg.depth_scale);
  const PointCloud cloud = project_depth(depth, cfg.intrinsics_for(depth.size()));

  fs::path target = out_file;
  if (target.empty()) target = output_dir(cfg) / (fs::path(depth_file).stem().string() + ".xyz");
  std::string text;
  for (const Point3& p : cloud.points) {
    text += format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
  }
  write_text(target, text);
  if (cloud.points.empty()) err << "warning: " << depth_file << " has no valid depth; wrote an empty point cloud\n";
  out << cloud.points.size() << " points -> " << target.string() << "\n";
  return kExitOk;
}

int cmd_dism_gen(const CommonFlags& flags, const std::string& annotations, const std::string& depth_arg,
                 std::ostream& out, std::ostream& err) {
  const std::vector<AnnotationRecord> records = read_annotations(annotations);
  require_path(depth_arg, "depth path");
  const RunConfig cfg = resolve_config(flags);
  const fs::path dir = output_dir(cfg);
  parallel::ThreadGuard threads(cfg.jobs);

  struct Outcome {
    std::string status = "ok";
    std::string message;
    std::optional<GazeBins> bins;
    std::size_t captured = 0;
    std::string file;
  };
  std::vector<Outcome> outcomes(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const AnnotationRecord& r = records[i];
    Outcome& o = outcomes[i];
    try {
      const DepthMap depth = load_record_depth(depth_arg, r, cfg.depth_scale);
      const DismResult res = generate_dism(depth, r.head_box, r.to_pixel_annotation(),
                                           cfg.intrinsics_for(depth.size()), cfg.dism);
      o.file = record_name(r, static_cast<std::size_t>(i), "dism", cfg.image_format);
      save_mask(res.mask, dir / o.file);
      o.bins = res.bins;
      o.captured = res.captured_points;
      if (res.empty_label) {
        o.status = "warn";
        o.message = "empty_label";
      }
    } catch (const std::exception& e) {
      o.status = "error";
      o.message = e.what();
    }
  }

  std::size_t ok = 0, warn = 0, errors = 0;
  json rows = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Outcome& o = outcomes[i];
    json row{{"index", i}, {"image_path", records[i].image_path}, {"status", o.status}};
    if (!o.file.empty()) row["mask"] = o.file;
    if (!o.message.empty()) row[o.status == "error" ? "error" : "warning"] = o.message;
    if (o.bins) {
      row["image_bin"] = std::string(to_string(o.bins->image));
      row["depth_bin"] = std::string(to_string(o.bins->depth));
      row["face_depth"] = o.bins->face_depth;
      row["target_depth"] = o.bins->target_depth;
    }
    row["captured_points"] = o.captured;
    rows.push_back(std::move(row));
    if (o.status == "ok") ++ok;
    if (o.status == "warn") ++warn;
    if (o.status == "error") {
      ++errors;
      err << "record " << i << " (" << records[i].image_path << "): " << o.message << "\n";
    }
  }
  const json sidecar{{"params", cfg.to_json()},
                     {"records", rows},
                     {"summary", {{"ok", ok}, {"warn", warn}, {"err", errors}}}};
  write_text(dir / "dism_run.json", sidecar.dump(2) + "\n");
  out << ok << " ok, " << warn << " warn, " << errors << " err\n";
  return errors == 0 ? kExitOk : kExitIncomplete;
}

int cmd_bin(const CommonFlags& flags, const std::string& annotations, const std::string& depth_arg,
            std::ostream& out, std::ostream& err) {
  const std::vector<AnnotationRecord> records = read_annotations(annotations);
  require_path(depth_arg, "depth path");
  const RunConfig cfg = resolve_config(flags);
  parallel::ThreadGuard threads(cfg.jobs);

  std::vector<std::string> lines(records.size());
  std::vector<std::string> failures(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const AnnotationRecord& r = records[i];
    std::string bins = "error,error";
    try {
      const DepthMap depth = load_record_depth(depth_arg, r, cfg.depth_scale);
      const GazeBins b = bin_gaze(r.to_pixel_annotation(), depth, r.head_box, cfg.dism.thresholds,
                                  cfg.dism.target_window_radius);
      bins = std::string(to_string(b.image)) + "," + std::string(to_string(b.depth));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
    lines[i] = std::to_string(i) + "," + r.image_path + "," + bins + "\n";
  }

  std::string csv = "index,image_path,image_bin,depth_bin\n";
  std::size_t errors = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    csv += lines[i];
    if (!failures[i].empty()) {
      ++errors;
      err << "record " << i << " (" << records[i].image_path << "): " << failures[i] << "\n";
    }
  }
  if (cfg.out_dir.empty()) {
    out << csv;
  } else {
    write_text(output_dir(cfg) / "bins.csv", csv);
    out << records.size() - errors << " binned, " << errors << " err\n";
  }
  return errors == 0 ? kExitOk : kExitIncomplete;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_eval(const CommonFlags& flags, const std::string& annotations, const std::string& predictions,
             const std::string& per_record_csv, std::ostream& out, std::ostream& err) {
  const std::vector<AnnotationRecord> records = read_annotations(annotations);
  require_path(predictions, "predictions directory");
  const RunConfig cfg = resolve_config(flags);
  parallel::ThreadGuard threads(cfg.jobs);

  std::vector<fs::path> files(records.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const char* ext : {"png", "pgm"}) {
      const fs::path p = fs::path(predictions) / record_name(records[i], i, "pred", ext);
      if (fs::exists(p)) {
        files[i] = p;
        break;
      }
    }
    if (files[i].empty()) missing.push_back(i);
  }
  if (!missing.empty()) {
    err << "missing predictions for " << missing.size() << " record(s):\n";
    for (std::size_t i : missing) {
      err << "  " << record_name(records[i], i, "pred", "png") << " (" << records[i].image_path << ")\n";
    }
    return kExitIncomplete;
  }

  std::vector<Heatmap> heatmaps(records.size());
  std::vector<std::string> failures(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      heatmaps[i] = load_heatmap(files[i]);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!failures[i].empty()) throw CommandError(kExitUsage, failures[i]);
  }

  const EvalReport rep = evaluate(heatmaps, records, EvalOptions{cfg.sigma});
  const json report{{"auc", optional_json(rep.auc)},
                    {"dist", optional_json(rep.dist)},
                    {"min_dist", optional_json(rep.min_dist)},
                    {"angular_deg", optional_json(rep.angular_deg)},
                    {"n_samples", rep.n_samples},
                    {"n_skipped_per_metric",
                     {{"auc", rep.n_skipped.auc},
                      {"dist", rep.n_skipped.dist},
                      {"min_dist", rep.n_skipped.min_dist},
                      {"angular_deg", rep.n_skipped.angular}}}};
  const std::string text = report.dump(2) + "\n";
  if (!cfg.out_dir.empty()) write_text(output_dir(cfg) / "eval_report.json", text);
  out << text;

  if (!per_record_csv.empty()) {
    auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string csv = "index,image_path,auc,dist,min_dist,angular_deg\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const RecordMetrics& m = rep.per_record[i];
      csv += std::to_string(i) + "," + records[i].image_path + "," + cell(m.auc) + "," + cell(m.dist) + "," +
             cell(m.min_dist) + "," + cell(m.angular_deg) + "\n";
    }
    write_text(per_record_csv, csv);
  }
  return kExitOk;
}

int cmd_pipeline(const CommonFlags& flags, const std::string& annotations, const std::string& depth_arg,
                 const std::string& weights_arg, const std::string& images_dir, const std::string& dism_dir,
                 std::ostream& out, std::ostream& err) {
  const std::vector<AnnotationRecord> records = read_annotations(annotations);
  require_path(depth_arg, "depth path");
  const RunConfig cfg = resolve_config(flags);

  PredictorConfig base;
  base.dism = cfg.dism;
  base.heatmap = cfg.mmf.heatmap;
  base.sigma = cfg.sigma;
  if (weights_arg != "baseline") {
    require_path(weights_arg, "weight bundle");
    try {
      base.weights = MmfWeights::from_bundle(WeightBundle::load(weights_arg));
    } catch (const FormatError& e) {
      throw CommandError(kExitUsage, std::string("bad weight bundle: ") + weights_arg + ": " + e.what());
    }
  }
  const fs::path dir = output_dir(cfg);
  parallel::ThreadGuard threads(cfg.jobs);

  struct Outcome {
    std::optional<Point2> point;
    std::string flags;
    std::string error;
  };
  std::vector<Outcome> outcomes(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const AnnotationRecord& r = records[i];
    Outcome& o = outcomes[i];
    try {
      const DepthMap depth = load_record_depth(depth_arg, r, cfg.depth_scale);
      PredictorConfig pc = base;
      pc.intrinsics = cfg.intrinsics_for(depth.size());

      std::optional<Tensor3> image;
      if (!images_dir.empty()) image = load_image(fs::path(images_dir) / r.image_path);
      std::optional<BinaryMask> dism;
      if (!dism_dir.empty()) {
        dism = load_mask(fs::path(dism_dir) / record_name(r, static_cast<std::size_t>(i), "dism", cfg.image_format));
      }

      PipelineInputs in;
      in.image = image ? &*image : nullptr;
      in.depth = &depth;
      in.head_box = r.head_box;
      in.annotation = r.to_pixel_annotation();
      in.dism = dism ? &*dism : nullptr;
      const Prediction p = pipeline_predict(in, pc);
      save_heatmap(p.heatmap, dir / record_name(r, static_cast<std::size_t>(i), "pred", cfg.image_format));
      o.point = p.point;
      if (p.fallback_center) o.flags = "fallback_center";
      else if (p.empty_dism) o.flags = "empty_dism";
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  }

  std::string csv = "index,image_path,x,y,flags\n";
  std::size_t errors = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (!o.error.empty()) {
      ++errors;
      err << "record " << i << " (" << records[i].image_path << "): " << o.error << "\n";
      csv += std::to_string(i) + "," + records[i].image_path + ",,,error\n";
      continue;
    }
    if (!o.flags.empty()) err << "warning: record " << i << ": " << o.flags << "\n";
    csv += std::to_string(i) + "," + records[i].image_path + "," + format_double(o.point->x) + "," +
           format_double(o.point->y) + "," + o.flags + "\n";
  }
  write_text(dir / "points.csv", csv);
  out << records.size() - errors << " predicted, " << errors << " err\n";
  return errors == 0 ? kExitOk : kExitIncomplete;
}

int cmd_weights_init(const CommonFlags& flags, const std::string& out_file, std::ostream& out) {
  const RunConfig cfg = resolve_config(flags);
  MmfWeights::random(cfg.mmf, cfg.seed).to_bundle().save(out_file);
  out << "wrote " << out_file << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-infused gaze target detection toolkit", args.empty() ? "depthgaze" : args.front()};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string depth, annotations, out_file, predictions, per_record_csv, weights, images_dir, dism_dir;

  auto* project = app.add_subcommand("project", "Back-project a depth map to an ASCII XYZ point cloud");
  project->add_option("--depth", depth, "Depth map (16-bit PNG or PGM)")->required();
  project->add_option("--out", out_file, "Output .xyz file (default <out-dir>/<stem>.xyz)");
  add_common(project, flags);

  auto* dism = app.add_subcommand("dism-gen", "Generate DISM pseudo-label masks");
  dism->add_option("--depth", depth, "Depth map file, or directory of <image-stem>.png/.pgm")->required();
  dism->add_option("--annotations", annotations, "Annotation CSV")->required();
  add_common(dism, flags);

  auto* bin = app.add_subcommand("bin", "Bin each record's gaze into image/depth-plane sectors");
  bin->add_option("--depth", depth, "Depth map file or directory")->required();
  bin->add_option("--annotations", annotations, "Annotation CSV")->required();
  add_common(bin, flags);

  auto* eval = app.add_subcommand("eval", "Score prediction heatmaps (AUC, Dist, Min Dist, angle)");
  eval->add_option("--annotations", annotations, "Annotation CSV")->required();
  eval->add_option("--predictions", predictions, "Directory of <image-stem>_<row>_pred.png")->required();
  eval->add_option("--per-record-csv", per_record_csv, "Optional per-record metrics CSV");
  add_common(eval, flags);

  auto* pipe = app.add_subcommand("pipeline", "Predict gaze heatmaps and points");
  pipe->add_option("--depth", depth, "Depth map file or directory")->required();
  pipe->add_option("--annotations", annotations, "Annotation CSV")->required();
  pipe->add_option("--weights", weights, "Weight bundle (MMFW) or 'baseline'")->required();
  pipe->add_option("--images", images_dir, "Directory the annotation image paths are relative to");
  pipe->add_option("--dism-dir", dism_dir, "Use masks from dism-gen instead of generating them");
  add_common(pipe, flags);

  auto* winit = app.add_subcommand("weights-init", "Write a seeded random weight bundle for the configured shapes");
  winit->add_option("--out", out_file, "Output bundle path")->required();
  add_common(winit, flags);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*project) return cmd_project(flags, depth, out_file, out, err);
    if (*dism) return cmd_dism_gen(flags, annotations, depth, out, err);
    if (*bin) return cmd_bin(flags, annotations, depth, out, err);
    if (*eval) return cmd_eval(flags, annotations, predictions, per_record_csv, out, err);
    if (*pipe) return cmd_pipeline(flags, annotations, depth, weights, images_dir, dism_dir, out, err);
    if (*winit) return cmd_weights_init(flags, out_file, out);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace depthgaze::cli
