#include "radarsplat/kernel.hpp"

#include <cmath>

#include "radarsplat/errors.hpp"

namespace radarsplat {

RbfKernel::RbfKernel(double lengthscale, double signal_variance)
    : lengthscale_(lengthscale), signal_variance_(signal_variance) {
  if (!std::isfinite(lengthscale) || lengthscale <= 0.0) {
    throw InvalidInput("RBF lengthscale must be positive");
  }
  if (!std::isfinite(signal_variance) || signal_variance <= 0.0) {
    throw InvalidInput("RBF signal variance must be positive");
  }
}

double RbfKernel::from_squared_distance(double d2) const {
  return signal_variance_ * std::exp(-d2 / (2.0 * lengthscale_ * lengthscale_));
}

Eigen::MatrixXd squared_distance_matrix(std::span<const AngularCoordinate> xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = RbfKernel::squared_distance(xs[i], xs[j]);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd gram_matrix(const RbfKernel& k,
                            std::span<const AngularCoordinate> xs) {
  if (xs.empty()) throw InvalidInput("gram matrix of an empty input set");
  return gram_matrix(k, squared_distance_matrix(xs));
}

Eigen::MatrixXd gram_matrix(const RbfKernel& k,
                            const Eigen::MatrixXd& squared_distances) {
  const Eigen::Index n = squared_distances.rows();
  if (n == 0) throw InvalidInput("gram matrix of an empty input set");
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    g(j, j) = k.signal_variance();
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = k.from_squared_distance(squared_distances(i, j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace radarsplat
