#include "radarsplat/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "radarsplat/errors.hpp"
#include "radarsplat/text.hpp"

namespace radarsplat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EvalReport evaluate_method(const std::string& method, const Raster& predictions,
                           const Raster& truth, std::span<const std::uint8_t> detected) {
  if (predictions.width != truth.width || predictions.height != truth.height ||
      predictions.values.size() != truth.values.size() ||
      truth.values.size() != truth.width * truth.height) {
    throw InvalidInput("prediction and truth grids differ in shape");
  }
  if (!(predictions.range == truth.range)) {
    throw InvalidInput("prediction and truth grids cover different angular ranges");
  }
  if (!detected.empty() && detected.size() != truth.values.size()) {
    throw InvalidInput("detection mask does not match the grid");
  }
  if (truth.values.empty()) throw InvalidInput("empty evaluation grid");

  EvalReport r;
  r.method = method;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double det_sum = 0.0;
  std::size_t det_count = 0;
  for (std::size_t k = 0; k < truth.values.size(); ++k) {
    const double e = predictions.values[k] - truth.values[k];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    if (!detected.empty() && detected[k]) {
      det_sum += std::abs(e);
      ++det_count;
    }
  }
  const auto n = static_cast<double>(truth.values.size());
  r.mae = abs_sum / n;
  r.rmse = std::sqrt(sq_sum / n);
  if (det_count > 0) r.mae_detected = det_sum / static_cast<double>(det_count);
  return r;
}

std::vector<std::uint8_t> detected_mask(const SparseDepthScan& scan, const AngularRange& range,
                                        std::size_t width, std::size_t height) {
  const RegionPartition grid(range, width, height);
  std::vector<std::uint8_t> mask(width * height, 0);
  for (const auto& rec : scan.records) {
    if (range.contains(rec.direction)) mask[grid.assign_region(rec.direction)] = 1;
  }
  return mask;
}

Comparison compare_methods(const SparseDepthScan& scan, const Raster& truth,
                           const ComparisonConfig& config) {
  const auto mask = detected_mask(scan, truth.range, truth.width, truth.height);
  std::ostringstream echo;
  echo << "regions=" << config.partition.azimuth_cells << 'x' << config.partition.elevation_cells
       << ";noise_variance=" << text::format_number(config.gp.noise_variance)
       << ";grid=" << truth.width << 'x' << truth.height << ";T=" << scan.records.size();

  Comparison c;
  {
    auto start = Clock::now();
    const GpPosterior global = fit_global(scan.to_dataset(config.gp.noise_variance), config.gp);
    const double fit_s = seconds_since(start);
    start = Clock::now();
    const DepthField f = rasterize_depth_field(global, truth.range, truth.width, truth.height);
    const double pred_s = seconds_since(start);
    c.conventional = evaluate_method("conventional", f.mean, truth, mask);
    c.conventional.fit_seconds = fit_s;
    c.conventional.predict_seconds = pred_s;
    c.conventional.config = echo.str();
  }
  {
    const RegionPartition part(truth.range, config.partition.azimuth_cells,
                               config.partition.elevation_cells);
    LocalizedFitOptions opts;
    opts.gp = config.gp;
    opts.parallel = config.parallel;
    opts.threads = config.threads;
    auto start = Clock::now();
    const LocalizedGpModel model = fit_localized(scan, part, opts);
    const double fit_s = seconds_since(start);
    start = Clock::now();
    const DepthField f = rasterize_depth_field(model, truth.range, truth.width, truth.height,
                                               config.parallel ? config.threads : 1);
    const double pred_s = seconds_since(start);
    c.localized = evaluate_method("localized", f.mean, truth, mask);
    c.localized.fit_seconds = fit_s;
    c.localized.predict_seconds = pred_s;
    c.localized.config = echo.str();
  }
  return c;
}

std::string BenchMethod::label() const {
  if (kind == BenchMethodKind::conventional) return "conventional";
  std::ostringstream s;
  s << "localized" << (parallel ? "-parallel" : "") << '-' << partition.azimuth_cells << 'x'
    << partition.elevation_cells;
  return s.str();
}

std::vector<BenchmarkRow> benchmark(const BenchmarkConfig& config) {
  if (config.repetitions < 3) throw InvalidInput("benchmark needs at least 3 repetitions");
  if (config.scan_sizes.empty() || config.methods.empty()) {
    throw InvalidInput("benchmark needs at least one scan size and one method");
  }
  const SyntheticScene scene =
      generate_scene(config.range, config.scene_patches, config.seed, config.scene_noise);
  const auto queries = raster_centers(config.range, config.grid_width, config.grid_height);

  std::vector<BenchmarkRow> rows;
  for (const std::size_t size : config.scan_sizes) {
    const SparseDepthScan scan = sample_scan(scene, size, config.seed + 1);
    for (const auto& method : config.methods) {
      std::vector<double> fit_t, pred_t, total_t;
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        double fit_s = 0.0;
        double pred_s = 0.0;
        if (method.kind == BenchMethodKind::conventional) {
          auto start = Clock::now();
          const GpPosterior post = fit_global(scan.to_dataset(config.gp.noise_variance), config.gp);
          fit_s = seconds_since(start);
          start = Clock::now();
          std::vector<Prediction> out(queries.size());
          post.predict(queries, out);
          pred_s = seconds_since(start);
        } else {
          const RegionPartition part(config.range, method.partition.azimuth_cells,
                                     method.partition.elevation_cells);
          LocalizedFitOptions opts;
          opts.gp = config.gp;
          opts.parallel = method.parallel;
          opts.threads = config.threads;
          auto start = Clock::now();
          const LocalizedGpModel model = fit_localized(scan, part, opts);
          fit_s = seconds_since(start);
          start = Clock::now();
          const auto out = model.predict_batch(queries, method.parallel ? config.threads : 1);
          pred_s = seconds_since(start);
        }
        fit_t.push_back(fit_s);
        pred_t.push_back(pred_s);
        total_t.push_back(fit_s + pred_s);
      }
      BenchmarkRow row;
      row.method = method.label();
      row.scan_size = size;
      row.regions = method.kind == BenchMethodKind::conventional
                        ? 1
                        : method.partition.azimuth_cells * method.partition.elevation_cells;
      row.parallel = method.parallel;
      row.queries = queries.size();
      row.repetitions = config.repetitions;
      row.median_fit_seconds = median(fit_t);
      row.median_predict_seconds = median(pred_t);
      row.median_total_seconds = median(total_t);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_benchmark_csv(std::span<const BenchmarkRow> rows, std::ostream& out,
                         std::uint64_t seed) {
  out << "method,scan_size,regions,parallel,queries,repetitions,median_fit_s,"
         "median_predict_s,median_total_s,seed\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.scan_size << ',' << r.regions << ',' << (r.parallel ? 1 : 0)
        << ',' << r.queries << ',' << r.repetitions << ','
        << text::format_number(r.median_fit_seconds) << ','
        << text::format_number(r.median_predict_seconds) << ','
        << text::format_number(r.median_total_seconds) << ',' << seed << '\n';
  }
}

void write_eval_csv(std::span<const EvalReport> reports, std::ostream& out) {
  out << "method,mae_m,rmse_m,mae_detected_m,config\n";
  for (const auto& r : reports) {
    out << r.method << ',' << text::format_number(r.mae) << ',' << text::format_number(r.rmse)
        << ',' << (r.mae_detected ? text::format_number(*r.mae_detected) : std::string("nan"))
        << ',' << r.config << '\n';
  }
}

}  // namespace radarsplat
