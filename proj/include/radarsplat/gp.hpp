#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "radarsplat/geometry.hpp"
#include "radarsplat/kernel.hpp"

namespace radarsplat {

/// 0.2 m radar range noise.
inline constexpr double kDefaultNoiseVariance = 0.04;
inline constexpr double kSignalVarianceFloor = 1e-6;

struct GpDataset {
  std::vector<AngularCoordinate> inputs;
  std::vector<double> targets;  // meters
  double noise_variance = kDefaultNoiseVariance;

  std::size_t size() const { return inputs.size(); }
  /// Throws InvalidInput on length mismatch, negative noise or non-finite values.
  void validate() const;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP posterior conditioned on a dataset. Targets are centered by their
/// empirical mean before conditioning and the offset is added back on output,
/// so far-field predictions revert to the data mean rather than to zero depth.
///
/// Immutable after fit(); safe to query concurrently.
class GpPosterior {
 public:
  /// Throws InvalidInput for an empty or invalid dataset and DegenerateData if
  /// K + noise I cannot be factorized after jitter escalation.
  static GpPosterior fit(GpDataset data, const RbfKernel& kernel);

  Prediction predict(const AngularCoordinate& x) const;

  /// Batched prediction. Results are bitwise identical to calling predict() on
  /// each query, whatever the batch composition.
  void predict(std::span<const AngularCoordinate> xs,
               std::span<Prediction> out) const;

  const GpDataset& dataset() const { return data_; }
  const RbfKernel& kernel() const { return kernel_; }
  double mean_offset() const { return mean_offset_; }
  /// Diagonal jitter that was needed on top of the noise variance (0 if none).
  double jitter() const { return jitter_; }
  /// Lower-triangular factor of K + (noise + jitter) I.
  Eigen::MatrixXd cholesky() const { return chol_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  GpPosterior(GpDataset data, const RbfKernel& kernel)
      : data_(std::move(data)), kernel_(kernel) {}

  void predict_chunk(std::span<const AngularCoordinate> xs,
                     std::span<Prediction> out) const;

  GpDataset data_;
  RbfKernel kernel_;
  double mean_offset_ = 0.0;
  double jitter_ = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> chol_;
  Eigen::VectorXd weights_;
};

inline GpPosterior fit(GpDataset data, const RbfKernel& kernel) {
  return GpPosterior::fit(std::move(data), kernel);
}

inline Prediction predict(const GpPosterior& post, const AngularCoordinate& x) {
  return post.predict(x);
}

/// Prior used where no observations exist: (mean_offset, signal variance).
Prediction predict_prior(const RbfKernel& kernel, const AngularCoordinate& x,
                         double mean_offset);

/// Gaussian log evidence of the mean-centered targets. Throws InvalidInput for
/// T = 0 and DegenerateData on factorization failure.
double log_marginal_likelihood(const GpDataset& data, const RbfKernel& kernel);

struct LengthscaleBounds {
  double min = 1e-3;
  double max = 2.0;
};

/// Log-uniform grid over the bounds. A single-point grid sits at the geometric
/// midpoint.
std::vector<double> lengthscale_grid(const LengthscaleBounds& bounds,
                                     std::size_t points);

struct LengthscaleSearch {
  RbfKernel kernel;
  double log_likelihood;
  /// Set when T < 2; the template kernel is returned untouched.
  bool insufficient_data = false;
};

/// Maximizes the log marginal likelihood over the lengthscale: log-uniform grid
/// scan, then golden-section refinement inside the bracket around the best
/// grid point. The template's signal variance is kept. Ties prefer the larger
/// lengthscale.
LengthscaleSearch optimize_lengthscale(const GpDataset& data,
                                       const RbfKernel& kernel_template,
                                       const LengthscaleBounds& bounds,
                                       std::size_t grid_points);

/// Hyperparameter policy shared by the conventional and localized models.
struct GpSettings {
  double noise_variance = kDefaultNoiseVariance;
  LengthscaleBounds bounds{};
  std::size_t grid_points = 32;
  std::size_t refine_iterations = 20;
  /// Lengthscale used where a dataset is too small to optimize.
  double template_lengthscale = 0.1;
  /// Signal variance of the template kernel; defaults to the empirical
  /// variance of all observations.
  std::optional<double> template_signal_variance;

  void validate() const;
};

/// Variance of the centered targets, floored at kSignalVarianceFloor.
double empirical_signal_variance(std::span<const double> targets);

RbfKernel make_template_kernel(const GpSettings& settings,
                               std::span<const double> all_targets);

/// Fits one GP with the standard hyperparameter policy: for T >= 2 the signal
/// variance is the empirical target variance and the lengthscale is optimized;
/// for T = 1 the template kernel is used as is.
GpPosterior fit_with_search(GpDataset data, const RbfKernel& kernel_template,
                            const GpSettings& settings);

/// Conventional "global" GP over all observations.
GpPosterior fit_global(GpDataset data, const GpSettings& settings);

}  // namespace radarsplat
