#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radarsplat/gp.hpp"
#include "radarsplat/localized_gp.hpp"
#include "radarsplat/raster.hpp"
#include "radarsplat/scene.hpp"

namespace radarsplat {

struct EvalReport {
  std::string method;
  double mae = 0.0;   // meters
  double rmse = 0.0;  // meters
  /// MAE restricted to grid cells that contain at least one observation.
  std::optional<double> mae_detected;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  std::string config;
};

/// MAE and RMSE of a prediction grid against a truth grid of the same shape.
/// `detected` optionally masks the cells for the detected-angles MAE. Throws
/// InvalidInput when the grids are misaligned.
EvalReport evaluate_method(const std::string& method, const Raster& predictions,
                           const Raster& truth,
                           std::span<const std::uint8_t> detected = {});

/// 1 for grid cells holding at least one scan record.
std::vector<std::uint8_t> detected_mask(const SparseDepthScan& scan, const AngularRange& range,
                                        std::size_t width, std::size_t height);

struct PartitionSpec {
  std::size_t azimuth_cells = 6;
  std::size_t elevation_cells = 2;
};

struct ComparisonConfig {
  PartitionSpec partition;
  GpSettings gp;
  std::size_t grid_width = 180;
  std::size_t grid_height = 40;
  bool parallel = false;
  std::size_t threads = 0;
};

struct Comparison {
  EvalReport conventional;
  EvalReport localized;
};

/// Fits the conventional and the localized GP on `scan`, predicts the
/// evaluation grid and scores both against `truth`.
Comparison compare_methods(const SparseDepthScan& scan, const Raster& truth,
                           const ComparisonConfig& config);

enum class BenchMethodKind { conventional, localized };

struct BenchMethod {
  BenchMethodKind kind = BenchMethodKind::localized;
  PartitionSpec partition;
  bool parallel = false;

  std::string label() const;
};

struct BenchmarkConfig {
  std::vector<std::size_t> scan_sizes{2000};
  std::vector<BenchMethod> methods;
  std::size_t repetitions = 3;
  std::uint64_t seed = 42;
  std::size_t scene_patches = 5;
  double scene_noise = 0.3;
  AngularRange range = default_radar_range();
  std::size_t grid_width = 180;
  std::size_t grid_height = 40;
  std::size_t threads = 0;
  GpSettings gp;
};

struct BenchmarkRow {
  std::string method;
  std::size_t scan_size = 0;
  std::size_t regions = 1;
  bool parallel = false;
  std::size_t queries = 0;
  std::size_t repetitions = 0;
  double median_fit_seconds = 0.0;
  double median_predict_seconds = 0.0;
  double median_total_seconds = 0.0;
};

/// Median wall-clock fit + predict time per (scan size, method). Throws
/// InvalidInput for fewer than 3 repetitions.
std::vector<BenchmarkRow> benchmark(const BenchmarkConfig& config);

void write_benchmark_csv(std::span<const BenchmarkRow> rows, std::ostream& out,
                         std::uint64_t seed);
void write_eval_csv(std::span<const EvalReport> reports, std::ostream& out);

}  // namespace radarsplat
