#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radarsplat/geometry.hpp"
#include "radarsplat/gp.hpp"

namespace radarsplat {

struct DepthRecord {
  AngularCoordinate direction;
  double depth = 0.0;  // meters

  bool operator==(const DepthRecord&) const = default;
};

/// Sparse depth returns of a single radar transmission.
struct SparseDepthScan {
  std::vector<DepthRecord> records;
  std::string sensor;
  std::string timestamp;

  /// Throws InvalidInput for an empty scan, non-positive depth or invalid angles.
  void validate() const;
  std::vector<double> depths() const;
  GpDataset to_dataset(double noise_variance) const;
};

enum class ScanFormat { csv, json };

/// CSV: header `azimuth_deg,elevation_deg,depth_m`, one record per line.
/// JSON: array of {azimuth_deg, elevation_deg, depth_m[, sensor, timestamp]}.
/// Angles are degrees in files and radians in memory.
///
/// Throws ParseError (with 1-based line number for CSV) for malformed rows and
/// InvalidInput for empty files or invalid values.
SparseDepthScan import_scan(std::istream& in, ScanFormat format);

/// Writes a scan so that import_scan reproduces its records bit for bit.
void export_scan(const SparseDepthScan& scan, std::ostream& out, ScanFormat format);

/// Format from the file extension (.json -> json, anything else -> csv).
ScanFormat scan_format_for(const std::filesystem::path& path);

SparseDepthScan load_scan(const std::filesystem::path& path,
                          std::optional<ScanFormat> format = std::nullopt);
void save_scan(const SparseDepthScan& scan, const std::filesystem::path& path,
               std::optional<ScanFormat> format = std::nullopt);

}  // namespace radarsplat
