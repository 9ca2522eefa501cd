#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radarsplat/geometry.hpp"
#include "radarsplat/raster.hpp"
#include "radarsplat/scan.hpp"

namespace radarsplat {

struct SceneOptions {
  double base_depth = 60.0;
  /// Sum of the absolute wave amplitudes of the smooth background.
  double base_amplitude = 12.0;
  std::size_t waves = 4;
  /// Smallest wavelength-scale 1/|k| of any background wave.
  double min_lengthscale = deg_to_rad(10.0);
  double patch_depth_min = 5.0;
  double patch_depth_max = 40.0;
  double patch_azimuth_min = deg_to_rad(10.0);
  double patch_azimuth_max = deg_to_rad(35.0);
  double patch_elevation_min = deg_to_rad(6.0);
  double patch_elevation_max = deg_to_rad(20.0);
};

/// Smooth background plus rectangular foreground objects.
struct ScenePatch {
  AngularRange extent;
  double depth = 0.0;
};

struct SceneWave {
  double amplitude = 0.0;
  double k_azimuth = 0.0;
  double k_elevation = 0.0;
  double phase = 0.0;
};

/// Piecewise-smooth ground-truth depth over an angular range: a sum of cosine
/// waves around a base depth, overridden inside patches by the nearest patch.
class SyntheticScene {
 public:
  SyntheticScene(AngularRange range, std::uint64_t seed, double noise_sigma,
                 double base_depth, std::vector<SceneWave> waves,
                 std::vector<ScenePatch> patches);

  const AngularRange& range() const { return range_; }
  std::uint64_t seed() const { return seed_; }
  double noise_sigma() const { return noise_sigma_; }
  const std::vector<ScenePatch>& patches() const { return patches_; }
  const std::vector<SceneWave>& waves() const { return waves_; }

  double background_depth(const AngularCoordinate& x) const;
  double depth(const AngularCoordinate& x) const;

  /// Upper bound on |Laplacian| of the background: sum |a| |k|^2.
  double smooth_laplacian_bound() const;

 private:
  AngularRange range_;
  std::uint64_t seed_;
  double noise_sigma_;
  double base_depth_;
  std::vector<SceneWave> waves_;
  std::vector<ScenePatch> patches_;
};

/// Deterministic per (range, patches, seed, noise_sigma, options).
SyntheticScene generate_scene(const AngularRange& range, std::size_t patches,
                              std::uint64_t seed, double noise_sigma,
                              const SceneOptions& options = {});

/// `count` uniform random directions with depth = truth + N(0, sigma^2).
SparseDepthScan sample_scan(const SyntheticScene& scene, std::size_t count,
                            std::uint64_t seed);

Raster truth_raster(const SyntheticScene& scene, std::size_t width, std::size_t height);

}  // namespace radarsplat
