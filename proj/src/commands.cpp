#include "radarsplat/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "radarsplat/errors.hpp"
#include "radarsplat/eval.hpp"
#include "radarsplat/image_io.hpp"
#include "radarsplat/localized_gp.hpp"
#include "radarsplat/parallel.hpp"
#include "radarsplat/ply.hpp"
#include "radarsplat/pointcloud.hpp"
#include "radarsplat/raster.hpp"
#include "radarsplat/scan.hpp"
#include "radarsplat/scene.hpp"
#include "radarsplat/splat.hpp"

namespace radarsplat::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  std::string command;
  RunConfig config;
  std::string stage = "config";
  Json counts = Json::object();
  Json outputs = Json::array();
  Json warnings = Json::array();
  std::ostream* log = nullptr;
};

std::size_t worker_threads(const RunConfig& c) { return c.parallel ? c.threads : 1; }

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw InvalidInput("no " + what + " given");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw InvalidInput(what + " not found: '" + path.string() + "'");
  }
}

void record_output(Run& run, const fs::path& path) {
  run.outputs.push_back({{"path", path.generic_string()},
                         {"bytes", fs::file_size(path)},
                         {"sha256", sha256_file(path)}});
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

SparseDepthScan load_input_scan(Run& run) {
  run.stage = "load";
  require_file(run.config.input, "input scan");
  std::optional<ScanFormat> fmt;
  if (run.config.input_format == "csv") fmt = ScanFormat::csv;
  if (run.config.input_format == "json") fmt = ScanFormat::json;
  SparseDepthScan scan = load_scan(run.config.input, fmt);
  scan.validate();
  run.counts["observations"] = scan.records.size();
  return scan;
}

LocalizedGpModel fit_model(Run& run, const SparseDepthScan& scan) {
  run.stage = "fit";
  const RunConfig& c = run.config;
  const RegionPartition partition(c.range(), c.regions.azimuth_cells, c.regions.elevation_cells);
  LocalizedFitOptions opts;
  opts.gp = c.gp;
  opts.parallel = c.parallel;
  opts.threads = c.threads;
  LocalizedGpModel model = fit_localized(scan, partition, opts);

  const auto data = split_by_region(scan, partition, c.gp.noise_variance);
  Json regions = Json::array();
  for (std::size_t r = 0; r < model.region_count(); ++r) {
    Json entry{{"region", r}, {"observations", data[r].size()}};
    if (const GpPosterior* post = model.region(r)) {
      entry["lengthscale"] = post->kernel().lengthscale();
      entry["signal_variance"] = post->kernel().signal_variance();
      entry["jitter"] = post->jitter();
    }
    regions.push_back(std::move(entry));
  }
  run.counts["regions"] = model.region_count();
  run.counts["fitted_regions"] = model.fitted_region_count();
  run.counts["region_fits"] = std::move(regions);
  *run.log << "fitted " << model.fitted_region_count() << " of " << model.region_count()
           << " regions from " << scan.records.size() << " observations\n";
  return model;
}

void cmd_reconstruct(Run& run) {
  const SparseDepthScan scan = load_input_scan(run);
  const LocalizedGpModel model = fit_model(run, scan);
  const RunConfig& c = run.config;

  run.stage = "predict";
  const DepthField field =
      rasterize_depth_field(model, c.range(), c.raster_width, c.raster_height, worker_threads(c));

  run.stage = "write";
  const fs::path mean_path = c.output_dir / "depth_mean.csv";
  const fs::path var_path = c.output_dir / "depth_variance.csv";
  save_raster_csv(field.mean, mean_path);
  save_raster_csv(field.variance, var_path);
  record_output(run, mean_path);
  record_output(run, var_path);
  run.counts["raster_width"] = c.raster_width;
  run.counts["raster_height"] = c.raster_height;
  *run.log << "wrote " << mean_path.string() << " and " << var_path.string() << '\n';
}

void cmd_pointcloud(Run& run) {
  const SparseDepthScan scan = load_input_scan(run);
  const LocalizedGpModel model = fit_model(run, scan);
  const RunConfig& c = run.config;

  run.stage = "predict";
  const auto queries = sample_query_locations(c.range(), c.queries, c.seed);
  const PointCloudResult result = build_point_cloud(model, queries, c.quantile, worker_threads(c));
  run.counts["queries"] = queries.size();
  run.counts["retained"] = result.cloud.size();
  run.counts["dropped_empty_region"] = result.dropped_empty_region;
  run.counts["dropped_variance"] = result.dropped_variance;
  run.counts["dropped_nonpositive_depth"] = result.dropped_nonpositive;
  run.counts["variance_threshold"] = number_or_null(result.variance_threshold);
  if (result.empty_warning) {
    run.warnings.push_back("every sample was filtered out; the point cloud is empty");
    *run.log << "warning: every sample was filtered out; the point cloud is empty\n";
  }

  run.stage = "write";
  const fs::path ply_path = c.output_dir / "pointcloud.ply";
  save_ply(result.cloud, ply_path, c.ply_format);
  record_output(run, ply_path);
  *run.log << "kept " << result.cloud.size() << " of " << queries.size() << " samples -> "
           << ply_path.string() << '\n';
}

void cmd_render(Run& run) {
  const RunConfig& c = run.config;
  run.stage = "load";
  require_file(c.ply, "PLY file");
  require_file(c.camera, "camera file");
  const PointCloud cloud = load_ply(c.ply);
  const CameraModel camera = load_camera(c.camera);
  camera.validate();

  std::vector<GaussianPrimitive> gaussians;
  gaussians.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    GaussianPrimitive g;
    g.mean = {p.position.x, p.position.y, p.position.z};
    g.scale = Eigen::Vector3d::Constant(c.point_radius);
    g.opacity = c.opacity;
    g.color = Eigen::Vector3d(p.color[0], p.color[1], p.color[2]) / 255.0;
    gaussians.push_back(g);
  }

  run.stage = "render";
  const Image img = render_image(gaussians, camera, worker_threads(c));

  run.stage = "write";
  const fs::path out = c.image.empty() ? c.output_dir / "render.ppm" : c.image;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_image(img, out);
  record_output(run, out);
  run.counts["points"] = cloud.size();
  run.counts["width"] = img.width;
  run.counts["height"] = img.height;
  *run.log << "rendered " << cloud.size() << " splats -> " << out.string() << '\n';
}

void cmd_bench(Run& run) {
  const RunConfig& c = run.config;
  run.stage = "bench";
  BenchmarkConfig bc;
  bc.scan_sizes = c.bench_sizes;
  bc.repetitions = c.bench_repetitions;
  bc.seed = c.seed;
  bc.scene_patches = c.scene_patches;
  bc.scene_noise = c.scene_noise;
  bc.range = c.range();
  bc.grid_width = c.raster_width;
  bc.grid_height = c.raster_height;
  bc.threads = c.threads;
  bc.gp = c.gp;
  for (const auto& name : c.bench_methods) {
    BenchMethod m;
    m.kind = name == "conventional" ? BenchMethodKind::conventional : BenchMethodKind::localized;
    m.partition = c.regions;
    m.parallel = name == "localized-parallel";
    bc.methods.push_back(m);
  }
  const auto rows = benchmark(bc);

  run.stage = "write";
  const fs::path path = c.output_dir / "bench.csv";
  {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_benchmark_csv(rows, out, c.seed);
  }
  record_output(run, path);
  run.counts["rows"] = rows.size();
  for (const auto& r : rows) {
    *run.log << r.method << " T=" << r.scan_size << ": fit " << r.median_fit_seconds
             << " s, predict " << r.median_predict_seconds << " s, total "
             << r.median_total_seconds << " s\n";
  }
}

void cmd_eval(Run& run) {
  const RunConfig& c = run.config;
  run.stage = "synthesize";
  const SyntheticScene scene = generate_scene(c.range(), c.scene_patches, c.seed, c.scene_noise);
  const SparseDepthScan scan = sample_scan(scene, c.scan_size, c.seed + 1);
  const Raster truth = truth_raster(scene, c.raster_width, c.raster_height);

  run.stage = "evaluate";
  ComparisonConfig cc;
  cc.partition = c.regions;
  cc.gp = c.gp;
  cc.grid_width = c.raster_width;
  cc.grid_height = c.raster_height;
  cc.parallel = c.parallel;
  cc.threads = c.threads;
  const Comparison cmp = compare_methods(scan, truth, cc);

  run.stage = "write";
  const fs::path path = c.output_dir / "eval.csv";
  std::vector<EvalReport> reports{cmp.conventional, cmp.localized};
  for (auto& r : reports) {
    r.config += ";scene_seed=" + std::to_string(c.seed) +
                ";scan_seed=" + std::to_string(c.seed + 1);
  }
  {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_eval_csv(reports, out);
  }
  record_output(run, path);
  run.counts["observations"] = scan.records.size();
  run.counts["mae_conventional"] = cmp.conventional.mae;
  run.counts["mae_localized"] = cmp.localized.mae;
  for (const auto& r : reports) {
    *run.log << r.method << ": MAE " << r.mae << " m, RMSE " << r.rmse << " m\n";
  }
}

void cmd_synth(Run& run) {
  const RunConfig& c = run.config;
  run.stage = "synthesize";
  const SyntheticScene scene = generate_scene(c.range(), c.scene_patches, c.seed, c.scene_noise);
  const SparseDepthScan scan = sample_scan(scene, c.scan_size, c.seed + 1);
  const Raster truth = truth_raster(scene, c.raster_width, c.raster_height);

  run.stage = "write";
  const bool json = c.input_format == "json";
  const fs::path scan_path = c.output_dir / (json ? "scan.json" : "scan.csv");
  const fs::path truth_path = c.output_dir / "truth_depth.csv";
  save_scan(scan, scan_path, json ? ScanFormat::json : ScanFormat::csv);
  save_raster_csv(truth, truth_path);
  record_output(run, scan_path);
  record_output(run, truth_path);
  run.counts["records"] = scan.records.size();
  run.counts["patches"] = scene.patches().size();
  *run.log << "wrote " << scan.records.size() << " records -> " << scan_path.string() << '\n';
}

const std::vector<std::pair<std::string, std::function<void(Run&)>>>& commands() {
  static const std::vector<std::pair<std::string, std::function<void(Run&)>>> table = {
      {"reconstruct", cmd_reconstruct}, {"pointcloud", cmd_pointcloud},
      {"render", cmd_render},           {"bench", cmd_bench},
      {"eval", cmd_eval},               {"synth", cmd_synth},
  };
  return table;
}

void write_manifest(const Run& run, const std::string& status, const std::string& error,
                    std::ostream& err) {
  Json config = Json::object();
  for (const auto& [k, v] : run.config.entries()) config[k] = v;
  Json m;
  m["command"] = run.command;
  m["status"] = status;
  m["failure_stage"] = status == "ok" ? Json(nullptr) : Json(run.stage);
  m["error"] = error.empty() ? Json(nullptr) : Json(error);
  m["config"] = std::move(config);
  m["outputs"] = run.outputs;
  m["counts"] = run.counts;
  m["warnings"] = run.warnings;

  std::error_code ec;
  fs::create_directories(run.config.output_dir, ec);
  const fs::path path = run.config.output_dir / (run.command + "_manifest.json");
  std::ofstream out(path);
  if (!out) {
    err << "error: cannot write manifest '" << path.string() << "'\n";
    return;
  }
  out << m.dump(2) << '\n';
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : commands()) n.push_back(name);
    return n;
  }();
  return names;
}

int run_command(const std::string& command, const Invocation& invocation, std::ostream& log,
                std::ostream& err) {
  const auto& table = commands();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& entry) { return entry.first == command; });
  if (it == table.end()) {
    err << "error: unknown command '" << command << "'\n";
    return kUsageError;
  }

  Run run;
  run.command = command;
  run.log = &log;
  int code = kSuccess;
  std::string message;
  // Settle the manifest location first so that config errors are recorded too.
  for (const auto& [key, value] : invocation.overrides) {
    if (key != "output_dir") continue;
    try {
      run.config.set(key, value);
    } catch (const InvalidInput&) {
    }
  }
  try {
    if (invocation.config_file) {
      require_file(*invocation.config_file, "config file");
      load_config(*invocation.config_file, run.config);
    }
    for (const auto& [key, value] : invocation.overrides) run.config.set(key, value);
    run.config.validate();
    fs::create_directories(run.config.output_dir);
    it->second(run);
  } catch (const InvalidInput& e) {
    code = kUsageError;
    message = e.what();
  } catch (const ParseError& e) {
    code = kUsageError;
    message = e.what();
  } catch (const DomainError& e) {
    code = kUsageError;
    message = e.what();
  } catch (const std::exception& e) {
    code = kRuntimeError;
    message = e.what();
  }
  if (code != kSuccess) err << "error: " << command << " (" << run.stage << "): " << message << '\n';
  write_manifest(run, code == kSuccess ? "ok" : "failed", message, err);
  return code;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("SHA-256 initialization failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

}  // namespace radarsplat::cli
