#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "radarsplat/geometry.hpp"
#include "radarsplat/localized_gp.hpp"

namespace radarsplat {

struct DepthSample {
  AngularCoordinate location;
  double mean = 0.0;      // meters
  double variance = 0.0;  // meters^2
  std::size_t region = 0;
  bool from_empty_region = false;
};

using Rgb8 = std::array<std::uint8_t, 3>;
inline constexpr Rgb8 kMidGray{128, 128, 128};

struct CloudPoint {
  Point3 position;
  Rgb8 color = kMidGray;
  /// exp(-variance / signal_variance) of the prediction that produced the
  /// point; 1 for points loaded from files without that information.
  double confidence = 1.0;
};

struct PointCloud {
  std::vector<CloudPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// `count` i.i.d. uniform directions over the range; deterministic per seed.
std::vector<AngularCoordinate> sample_query_locations(const AngularRange& range,
                                                      std::size_t count,
                                                      std::uint64_t seed);

/// Nearest-rank quantile: the ceil(q * n)-th smallest value (q in (0, 1]).
double nearest_rank_quantile(std::span<const double> values, double q);

struct PointCloudResult {
  PointCloud cloud;
  std::vector<DepthSample> samples;
  /// Variance threshold realized by the quantile filter (NaN when no sample
  /// came from a fitted region).
  double variance_threshold = 0.0;
  std::size_t dropped_empty_region = 0;
  std::size_t dropped_variance = 0;
  /// Kept by the filter but with a predicted depth <= 0, which has no point
  /// on the ray. Happens where a short-lengthscale fit overshoots a depth edge.
  std::size_t dropped_nonpositive = 0;
  /// Every sample was filtered out.
  bool empty_warning = false;
};

/// Predicts every query, drops empty-region samples, keeps the rest whose
/// variance is <= the q-quantile of the fitted-region variances, and converts
/// survivors to 3D points in query order. Throws InvalidInput for q outside
/// (0, 1] and DomainError for out-of-domain queries.
PointCloudResult build_point_cloud(const LocalizedGpModel& model,
                                   std::span<const AngularCoordinate> queries,
                                   double variance_quantile, std::size_t threads = 1);

}  // namespace radarsplat
