#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "radarsplat/eval.hpp"
#include "radarsplat/geometry.hpp"
#include "radarsplat/gp.hpp"
#include "radarsplat/ply.hpp"

namespace radarsplat {

/// Settings shared by every subcommand. Loaded from a flat `key = value` file
/// (`#` starts a comment) and then overridden from the command line.
struct RunConfig {
  std::filesystem::path input;
  std::string input_format = "auto";  // auto | csv | json
  std::filesystem::path output_dir = "radarsplat_out";

  PartitionSpec regions;
  double az_min_deg = -90.0;
  double az_max_deg = 90.0;
  double el_min_deg = -20.0;
  double el_max_deg = 20.0;

  GpSettings gp;
  double quantile = 0.7;
  std::size_t queries = 20000;
  std::uint64_t seed = 0;
  std::size_t raster_width = 180;
  std::size_t raster_height = 40;
  PlyEncoding ply_format = PlyEncoding::binary_little_endian;
  bool parallel = false;
  std::size_t threads = 0;

  // render
  std::filesystem::path ply;
  std::filesystem::path camera;
  std::filesystem::path image;
  double point_radius = 0.05;
  double opacity = 0.8;

  // synth / eval / bench scenes
  std::size_t scene_patches = 5;
  double scene_noise = 0.3;
  std::size_t scan_size = 500;
  std::vector<std::size_t> bench_sizes{500, 2000};
  /// Any of conventional, localized, localized-parallel.
  std::vector<std::string> bench_methods{"conventional", "localized"};
  std::size_t bench_repetitions = 3;

  AngularRange range() const;

  /// Sets one key from its textual value. Throws InvalidInput naming the key
  /// when it is unknown or the value does not parse or is out of range.
  void set(const std::string& key, const std::string& value);

  /// Cross-field checks (bounds ordering, valid range, ...).
  void validate() const;

  /// Every key with its current value, in a fixed order; parses back via set.
  std::vector<std::pair<std::string, std::string>> entries() const;

  static const std::vector<std::string>& keys();
};

/// Applies every `key = value` line of `in` to `config`. Errors carry the
/// 1-based line number.
void parse_config(std::istream& in, RunConfig& config);
void load_config(const std::filesystem::path& path, RunConfig& config);

PartitionSpec parse_regions(const std::string& text);
std::string format_regions(const PartitionSpec& spec);
PlyEncoding parse_ply_format(const std::string& text);

}  // namespace radarsplat
