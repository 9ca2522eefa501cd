#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "radarsplat/geometry.hpp"
#include "radarsplat/gp.hpp"
#include "radarsplat/localized_gp.hpp"

namespace radarsplat {

/// Row-major grid over an angular range, sampled at cell centers. Row j holds
/// elevation el_min + (j + 0.5) * d_el (ascending), column i azimuth
/// az_min + (i + 0.5) * d_az.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  AngularRange range;
  std::vector<double> values;

  double at(std::size_t col, std::size_t row) const { return values[row * width + col]; }
};

/// Cell-center coordinates of a width x height grid, row-major.
std::vector<AngularCoordinate> raster_centers(const AngularRange& range, std::size_t width,
                                              std::size_t height);

struct DepthField {
  Raster mean;
  Raster variance;
};

/// Throws InvalidInput for zero dimensions.
DepthField rasterize_depth_field(const LocalizedGpModel& model, const AngularRange& range,
                                 std::size_t width, std::size_t height,
                                 std::size_t threads = 1);

/// Same grid evaluated with a single (conventional) GP.
DepthField rasterize_depth_field(const GpPosterior& model, const AngularRange& range,
                                 std::size_t width, std::size_t height);

/// First line `width,height,az_min_deg,az_max_deg,el_min_deg,el_max_deg`, then
/// one comma-separated line per row.
void write_raster_csv(const Raster& raster, std::ostream& out);
Raster read_raster_csv(std::istream& in);
void save_raster_csv(const Raster& raster, const std::filesystem::path& path);
Raster load_raster_csv(const std::filesystem::path& path);

}  // namespace radarsplat
