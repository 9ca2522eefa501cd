#pragma once

#include <span>

#include <Eigen/Core>

#include "radarsplat/geometry.hpp"

namespace radarsplat {

/// Isotropic squared-exponential covariance over (azimuth, elevation):
///
///   k(x, x') = signal_variance * exp(-|x - x'|^2 / (2 lengthscale^2))
///
/// with |.| the plain Euclidean norm on the angle pair (no wrap-around).
class RbfKernel {
 public:
  /// Throws InvalidInput unless both parameters are finite and positive.
  RbfKernel(double lengthscale, double signal_variance);

  double lengthscale() const { return lengthscale_; }
  double signal_variance() const { return signal_variance_; }

  RbfKernel with_lengthscale(double lengthscale) const {
    return {lengthscale, signal_variance_};
  }
  RbfKernel with_signal_variance(double signal_variance) const {
    return {lengthscale_, signal_variance};
  }

  double operator()(const AngularCoordinate& a, const AngularCoordinate& b) const {
    return from_squared_distance(squared_distance(a, b));
  }

  double from_squared_distance(double d2) const;

  static double squared_distance(const AngularCoordinate& a,
                                 const AngularCoordinate& b) {
    const double da = a.azimuth - b.azimuth;
    const double de = a.elevation - b.elevation;
    return da * da + de * de;
  }

  bool operator==(const RbfKernel&) const = default;

 private:
  double lengthscale_;
  double signal_variance_;
};

inline double evaluate(const RbfKernel& k, const AngularCoordinate& a,
                       const AngularCoordinate& b) {
  return k(a, b);
}

/// Pairwise squared angular distances; exactly symmetric with zero diagonal.
Eigen::MatrixXd squared_distance_matrix(std::span<const AngularCoordinate> xs);

/// T x T covariance matrix. Throws InvalidInput for an empty input list.
Eigen::MatrixXd gram_matrix(const RbfKernel& k,
                            std::span<const AngularCoordinate> xs);

/// Gram matrix from a precomputed squared-distance matrix.
Eigen::MatrixXd gram_matrix(const RbfKernel& k, const Eigen::MatrixXd& squared_distances);

}  // namespace radarsplat
