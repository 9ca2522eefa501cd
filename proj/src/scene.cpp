#include "radarsplat/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "radarsplat/errors.hpp"

namespace radarsplat {

SyntheticScene::SyntheticScene(AngularRange range, std::uint64_t seed, double noise_sigma,
                               double base_depth, std::vector<SceneWave> waves,
                               std::vector<ScenePatch> patches)
    : range_(range),
      seed_(seed),
      noise_sigma_(noise_sigma),
      base_depth_(base_depth),
      waves_(std::move(waves)),
      patches_(std::move(patches)) {
  validate(range_);
  if (!(noise_sigma_ >= 0.0)) throw InvalidInput("scene noise sigma must be non-negative");
}

double SyntheticScene::background_depth(const AngularCoordinate& x) const {
  double d = base_depth_;
  for (const auto& w : waves_) {
    d += w.amplitude * std::cos(w.k_azimuth * x.azimuth + w.k_elevation * x.elevation + w.phase);
  }
  return d;
}

double SyntheticScene::depth(const AngularCoordinate& x) const {
  double d = background_depth(x);
  for (const auto& p : patches_) {
    if (p.extent.contains(x)) d = std::min(d, p.depth);
  }
  return d;
}

double SyntheticScene::smooth_laplacian_bound() const {
  double bound = 0.0;
  for (const auto& w : waves_) {
    bound += std::abs(w.amplitude) *
             (w.k_azimuth * w.k_azimuth + w.k_elevation * w.k_elevation);
  }
  return bound;
}

SyntheticScene generate_scene(const AngularRange& range, std::size_t patches,
                              std::uint64_t seed, double noise_sigma,
                              const SceneOptions& options) {
  validate(range);
  if (options.patch_depth_min < 5.0 || options.patch_depth_max > 80.0 ||
      options.patch_depth_min > options.patch_depth_max) {
    throw InvalidInput("patch depths must lie within [5, 80] m");
  }
  if (options.base_depth - options.base_amplitude <= 0.0) {
    throw InvalidInput("background depth must stay positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<SceneWave> waves(options.waves);
  if (!waves.empty()) {
    // Split the amplitude budget with random positive weights.
    std::vector<double> weights(waves.size());
    double total = 0.0;
    for (auto& w : weights) total += (w = uniform(0.2, 1.0));
    for (std::size_t i = 0; i < waves.size(); ++i) {
      const double lengthscale = options.min_lengthscale * uniform(1.0, 3.0);
      const double angle = uniform(0.0, 2.0 * std::numbers::pi);
      waves[i].amplitude = options.base_amplitude * weights[i] / total;
      waves[i].k_azimuth = std::cos(angle) / lengthscale;
      waves[i].k_elevation = std::sin(angle) / lengthscale;
      waves[i].phase = uniform(0.0, 2.0 * std::numbers::pi);
    }
  }

  std::vector<ScenePatch> out;
  out.reserve(patches);
  for (std::size_t i = 0; i < patches; ++i) {
    const double w = std::min(uniform(options.patch_azimuth_min, options.patch_azimuth_max),
                              range.azimuth_span());
    const double h = std::min(uniform(options.patch_elevation_min, options.patch_elevation_max),
                              range.elevation_span());
    const double az0 = uniform(range.azimuth_min, range.azimuth_max - w);
    const double el0 = uniform(range.elevation_min, range.elevation_max - h);
    out.push_back({{az0, az0 + w, el0, el0 + h},
                   uniform(options.patch_depth_min, options.patch_depth_max)});
  }
  return {range, seed, noise_sigma, options.base_depth, std::move(waves), std::move(out)};
}

SparseDepthScan sample_scan(const SyntheticScene& scene, std::size_t count,
                            std::uint64_t seed) {
  if (count == 0) throw InvalidInput("scan size must be at least 1");
  std::mt19937_64 rng(seed);
  const auto& r = scene.range();
  std::uniform_real_distribution<double> az(r.azimuth_min, r.azimuth_max);
  std::uniform_real_distribution<double> el(r.elevation_min, r.elevation_max);
  std::normal_distribution<double> noise(0.0, 1.0);
  SparseDepthScan scan;
  scan.sensor = "synthetic";
  scan.timestamp = "seed-" + std::to_string(seed);
  scan.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const AngularCoordinate x{az(rng), el(rng)};
    const double truth = scene.depth(x);
    double depth = truth;
    if (scene.noise_sigma() > 0.0) {
      do {
        depth = truth + scene.noise_sigma() * noise(rng);
      } while (depth <= 0.0);
    }
    scan.records.push_back({x, depth});
  }
  return scan;
}

Raster truth_raster(const SyntheticScene& scene, std::size_t width, std::size_t height) {
  const auto centers = raster_centers(scene.range(), width, height);
  Raster r{width, height, scene.range(), {}};
  r.values.reserve(centers.size());
  for (const auto& c : centers) r.values.push_back(scene.depth(c));
  return r;
}

}  // namespace radarsplat
