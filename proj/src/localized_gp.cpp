#include "radarsplat/localized_gp.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "radarsplat/errors.hpp"
#include "radarsplat/parallel.hpp"

namespace radarsplat {

namespace {

std::vector<double> uniform_edges(double lo, double hi, std::size_t cells) {
  std::vector<double> edges(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

// Index of the half-open cell [e_i, e_{i+1}) holding v; the last cell is closed.
std::size_t locate(std::span<const double> edges, double v) {
  const std::size_t cells = edges.size() - 1;
  const double width = (edges.back() - edges.front()) / static_cast<double>(cells);
  double guess = std::floor((v - edges.front()) / width);
  std::size_t i = guess < 0.0 ? 0 : std::min(static_cast<std::size_t>(guess), cells - 1);
  while (i + 1 < cells && v >= edges[i + 1]) ++i;
  while (i > 0 && v < edges[i]) --i;
  return i;
}

constexpr std::size_t kQueryBlock = 256;

}  // namespace

RegionPartition::RegionPartition(const AngularRange& domain, std::size_t azimuth_cells,
                                 std::size_t elevation_cells)
    : domain_(domain) {
  validate(domain);
  if (azimuth_cells == 0 || elevation_cells == 0) {
    throw InvalidInput("region partition needs at least one cell per axis");
  }
  azimuth_edges_ = uniform_edges(domain.azimuth_min, domain.azimuth_max, azimuth_cells);
  elevation_edges_ =
      uniform_edges(domain.elevation_min, domain.elevation_max, elevation_cells);
}

RegionPartition::Cell RegionPartition::assign_cell(const AngularCoordinate& x) const {
  if (!domain_.contains(x)) {
    throw DomainError("coordinate (" + std::to_string(x.azimuth) + ", " +
                          std::to_string(x.elevation) + ") rad is outside the partition domain",
                      x.azimuth, x.elevation);
  }
  return {locate(azimuth_edges_, x.azimuth), locate(elevation_edges_, x.elevation)};
}

std::size_t RegionPartition::assign_region(const AngularCoordinate& x) const {
  return region_index(assign_cell(x));
}

AngularRange RegionPartition::region_bounds(std::size_t region) const {
  const Cell c = cell_of(region);
  return {azimuth_edges_[c.azimuth], azimuth_edges_[c.azimuth + 1],
          elevation_edges_[c.elevation], elevation_edges_[c.elevation + 1]};
}

LocalizedGpModel::LocalizedGpModel(RegionPartition partition,
                                   std::vector<std::optional<GpPosterior>> regions,
                                   RbfKernel template_kernel, double global_mean_offset)
    : partition_(std::move(partition)),
      regions_(std::move(regions)),
      template_(template_kernel),
      global_mean_(global_mean_offset) {
  if (regions_.size() != partition_.region_count()) {
    throw InvalidInput("localized model needs one entry per region");
  }
}

std::size_t LocalizedGpModel::fitted_region_count() const {
  return static_cast<std::size_t>(
      std::count_if(regions_.begin(), regions_.end(), [](const auto& r) { return r.has_value(); }));
}

LocalPrediction LocalizedGpModel::predict(const AngularCoordinate& x) const {
  return predict_batch({&x, 1}).front();
}

std::vector<LocalPrediction> LocalizedGpModel::predict_batch(
    std::span<const AngularCoordinate> xs, std::size_t threads) const {
  std::vector<LocalPrediction> out(xs.size());
  std::vector<std::vector<std::size_t>> by_region(regions_.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!partition_.domain().contains(xs[i])) {
      throw DomainError("query " + std::to_string(i) + " is outside the partition domain",
                        xs[i].azimuth, xs[i].elevation, i);
    }
    by_region[partition_.assign_region(xs[i])].push_back(i);
  }

  struct Block {
    std::size_t region;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Block> blocks;
  for (std::size_t r = 0; r < by_region.size(); ++r) {
    for (std::size_t b = 0; b < by_region[r].size(); b += kQueryBlock) {
      blocks.push_back({r, b, std::min(b + kQueryBlock, by_region[r].size())});
    }
  }

  parallel_for(blocks.size(), threads, [&](std::size_t bi) {
    const Block& blk = blocks[bi];
    const auto& idx = by_region[blk.region];
    const auto& post = regions_[blk.region];
    const std::size_t n = blk.end - blk.begin;
    std::vector<AngularCoordinate> qs(n);
    for (std::size_t k = 0; k < n; ++k) qs[k] = xs[idx[blk.begin + k]];
    std::vector<Prediction> preds(n);
    if (post) {
      post->predict(qs, preds);
    } else {
      for (std::size_t k = 0; k < n; ++k) preds[k] = predict_prior(template_, qs[k], global_mean_);
    }
    const double sf2 = post ? post->kernel().signal_variance() : template_.signal_variance();
    for (std::size_t k = 0; k < n; ++k) {
      out[idx[blk.begin + k]] = {preds[k].mean, preds[k].variance, blk.region, !post, sf2};
    }
  });
  return out;
}

std::vector<GpDataset> split_by_region(const SparseDepthScan& scan,
                                       const RegionPartition& partition,
                                       double noise_variance) {
  std::vector<GpDataset> sets(partition.region_count());
  for (auto& s : sets) s.noise_variance = noise_variance;
  for (std::size_t i = 0; i < scan.records.size(); ++i) {
    const auto& rec = scan.records[i];
    if (!partition.domain().contains(rec.direction)) {
      throw DomainError("observation " + std::to_string(i) +
                            " lies outside the partition domain",
                        rec.direction.azimuth, rec.direction.elevation, i);
    }
    auto& s = sets[partition.assign_region(rec.direction)];
    s.inputs.push_back(rec.direction);
    s.targets.push_back(rec.depth);
  }
  return sets;
}

LocalizedGpModel fit_localized(const SparseDepthScan& scan,
                               const RegionPartition& partition,
                               const LocalizedFitOptions& options) {
  scan.validate();
  options.gp.validate();
  std::vector<GpDataset> sets = split_by_region(scan, partition, options.gp.noise_variance);

  const std::vector<double> depths = scan.depths();
  const RbfKernel tmpl = make_template_kernel(options.gp, depths);
  const double global_mean =
      std::accumulate(depths.begin(), depths.end(), 0.0) / static_cast<double>(depths.size());

  std::vector<std::optional<GpPosterior>> regions(sets.size());
  parallel_for(sets.size(), options.parallel ? options.threads : 1, [&](std::size_t r) {
    if (sets[r].size() == 0) return;
    regions[r].emplace(fit_with_search(std::move(sets[r]), tmpl, options.gp));
  });
  return {partition, std::move(regions), tmpl, global_mean};
}

}  // namespace radarsplat
