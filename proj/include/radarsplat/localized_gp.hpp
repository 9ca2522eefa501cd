#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "radarsplat/geometry.hpp"
#include "radarsplat/gp.hpp"
#include "radarsplat/scan.hpp"

namespace radarsplat {

/// Uniform azimuth x elevation grid of non-overlapping cells. Cells are
/// half-open [lo, hi) on both axes except the last cell of each axis, which
/// also owns the domain's upper edge. Region index = elevation_cell *
/// azimuth_cells + azimuth_cell.
class RegionPartition {
 public:
  /// Throws InvalidInput for an invalid domain or zero cell counts.
  RegionPartition(const AngularRange& domain, std::size_t azimuth_cells,
                  std::size_t elevation_cells);

  struct Cell {
    std::size_t azimuth = 0;
    std::size_t elevation = 0;
    bool operator==(const Cell&) const = default;
  };

  const AngularRange& domain() const { return domain_; }
  std::size_t azimuth_cells() const { return azimuth_edges_.size() - 1; }
  std::size_t elevation_cells() const { return elevation_edges_.size() - 1; }
  std::size_t region_count() const { return azimuth_cells() * elevation_cells(); }
  std::span<const double> azimuth_edges() const { return azimuth_edges_; }
  std::span<const double> elevation_edges() const { return elevation_edges_; }

  /// Throws DomainError for coordinates outside the domain.
  Cell assign_cell(const AngularCoordinate& x) const;
  std::size_t assign_region(const AngularCoordinate& x) const;
  std::size_t region_index(const Cell& c) const {
    return c.elevation * azimuth_cells() + c.azimuth;
  }
  Cell cell_of(std::size_t region) const {
    return {region % azimuth_cells(), region / azimuth_cells()};
  }
  /// Angular extent of one region.
  AngularRange region_bounds(std::size_t region) const;

 private:
  AngularRange domain_;
  std::vector<double> azimuth_edges_;
  std::vector<double> elevation_edges_;
};

inline std::size_t assign_region(const RegionPartition& part,
                                 const AngularCoordinate& x) {
  return part.assign_region(x);
}

struct LocalizedFitOptions {
  GpSettings gp;
  /// Fit regions concurrently.
  bool parallel = false;
  /// Worker count when parallel (0 = hardware concurrency).
  std::size_t threads = 0;
};

struct LocalPrediction {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t region = 0;
  bool empty_region = false;
  /// Prior variance of the kernel that produced this prediction.
  double signal_variance = 0.0;
};

/// One independently conditioned GP per non-empty region of a partition.
class LocalizedGpModel {
 public:
  LocalizedGpModel(RegionPartition partition,
                   std::vector<std::optional<GpPosterior>> regions,
                   RbfKernel template_kernel, double global_mean_offset);

  const RegionPartition& partition() const { return partition_; }
  std::size_t region_count() const { return regions_.size(); }
  /// nullptr for an empty region.
  const GpPosterior* region(std::size_t r) const {
    return regions_.at(r) ? &*regions_[r] : nullptr;
  }
  const RbfKernel& template_kernel() const { return template_; }
  double global_mean_offset() const { return global_mean_; }
  std::size_t fitted_region_count() const;

  /// Throws DomainError for out-of-domain queries.
  LocalPrediction predict(const AngularCoordinate& x) const;

  /// Output order matches input order and is independent of `threads`.
  /// Throws DomainError carrying the index of the first out-of-domain query.
  std::vector<LocalPrediction> predict_batch(std::span<const AngularCoordinate> xs,
                                             std::size_t threads = 1) const;

 private:
  RegionPartition partition_;
  std::vector<std::optional<GpPosterior>> regions_;
  RbfKernel template_;
  double global_mean_;
};

/// Splits the scan by region and fits each non-empty region on its own
/// observations. Regions with >= 2 observations get their own lengthscale and
/// signal variance; single-observation regions use the template kernel.
/// Throws InvalidInput for an empty scan and DomainError when an observation
/// lies outside the partition domain.
LocalizedGpModel fit_localized(const SparseDepthScan& scan,
                               const RegionPartition& partition,
                               const LocalizedFitOptions& options = {});

/// Per-region training sets in scan order, as used by fit_localized.
std::vector<GpDataset> split_by_region(const SparseDepthScan& scan,
                                       const RegionPartition& partition,
                                       double noise_variance);

inline LocalPrediction predict_local(const LocalizedGpModel& model,
                                     const AngularCoordinate& x) {
  return model.predict(x);
}

inline std::vector<LocalPrediction> predict_batch(
    const LocalizedGpModel& model, std::span<const AngularCoordinate> xs,
    std::size_t threads = 1) {
  return model.predict_batch(xs, threads);
}

}  // namespace radarsplat
