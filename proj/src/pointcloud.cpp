#include "radarsplat/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "radarsplat/errors.hpp"

namespace radarsplat {

std::vector<AngularCoordinate> sample_query_locations(const AngularRange& range,
                                                      std::size_t count,
                                                      std::uint64_t seed) {
  validate(range);
  if (count == 0) throw InvalidInput("query count must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> az(range.azimuth_min, range.azimuth_max);
  std::uniform_real_distribution<double> el(range.elevation_min, range.elevation_max);
  std::vector<AngularCoordinate> out(count);
  for (auto& x : out) {
    x.azimuth = az(rng);
    x.elevation = el(rng);
  }
  return out;
}

double nearest_rank_quantile(std::span<const double> values, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("quantile must lie in (0, 1]");
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

PointCloudResult build_point_cloud(const LocalizedGpModel& model,
                                   std::span<const AngularCoordinate> queries,
                                   double variance_quantile, std::size_t threads) {
  if (!(variance_quantile > 0.0 && variance_quantile <= 1.0)) {
    throw InvalidInput("variance quantile must lie in (0, 1]");
  }
  const std::vector<LocalPrediction> preds = model.predict_batch(queries, threads);

  PointCloudResult result;
  result.samples.reserve(preds.size());
  std::vector<double> fitted_variances;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    result.samples.push_back({queries[i], p.mean, p.variance, p.region, p.empty_region});
    if (!p.empty_region) fitted_variances.push_back(p.variance);
  }
  result.variance_threshold = nearest_rank_quantile(fitted_variances, variance_quantile);

  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& s = result.samples[i];
    if (s.from_empty_region) {
      ++result.dropped_empty_region;
      continue;
    }
    if (!(s.variance <= result.variance_threshold)) {
      ++result.dropped_variance;
      continue;
    }
    if (!(s.mean > 0.0) || !std::isfinite(s.mean)) {
      ++result.dropped_nonpositive;
      continue;
    }
    CloudPoint pt;
    pt.position = spherical_to_cartesian(s.location, s.mean);
    pt.confidence = std::exp(-s.variance / preds[i].signal_variance);
    result.cloud.points.push_back(pt);
  }
  result.empty_warning = result.cloud.empty();
  return result;
}

}  // namespace radarsplat
