#include "radarsplat/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>

#include "radarsplat/errors.hpp"

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

namespace radarsplat {

namespace {

// Queries per forward-substitution block. Per-query arithmetic does not depend
// on the block composition, which keeps batched predictions bitwise stable.
constexpr std::size_t kPredictChunk = 32;

// Short-lengthscale kernels push Cholesky updates into subnormal range, where
// x86 arithmetic is several times slower. Flush them to zero while factorizing
// and solving; restores the caller's MXCSR on exit.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) {
    _mm_setcsr(saved_ | _MM_FLUSH_ZERO_ON | _MM_DENORMALS_ZERO_ON);
  }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
 public:
  FlushSubnormals(const FlushSubnormals&) = delete;
  FlushSubnormals& operator=(const FlushSubnormals&) = delete;
};

struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

// A pivot at rounding-error level means the matrix is singular in all but
// name (exactly coincident noiseless inputs), so it is rejected too.
bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt, double pivot_floor) {
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  return diag.allFinite() && (diag.array().square() > pivot_floor).all();
}

// Cholesky of `covariance` (gram + noise), escalating diagonal jitter from
// 1e-10 to 1e-4 times the signal variance.
Factor factorize(const Eigen::MatrixXd& covariance, double signal_variance) {
  Factor f;
  const double floor = 1e-12 * covariance.diagonal().maxCoeff();
  f.llt.compute(covariance);
  if (factor_ok(f.llt, floor)) return f;
  double jitter = 1e-10 * signal_variance;
  const double max_jitter = 1e-4 * signal_variance * (1.0 + 1e-12);
  for (; jitter <= max_jitter; jitter *= 10.0) {
    Eigen::MatrixXd jittered = covariance;
    jittered.diagonal().array() += jitter;
    f.llt.compute(jittered);
    if (factor_ok(f.llt, floor)) {
      f.jitter = jitter;
      return f;
    }
  }
  std::ostringstream msg;
  msg << "covariance not positive definite after jitter escalation up to "
      << jitter / 10.0;
  throw DegenerateData(msg.str(), jitter / 10.0);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Eigen::VectorXd centered(std::span<const double> y, double offset) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[i] - offset;
  return out;
}

double lml_from_covariance(Eigen::MatrixXd covariance, double signal_variance,
                           const Eigen::VectorXd& y_centered) {
  const FlushSubnormals guard;
  const Factor f = factorize(covariance, signal_variance);
  const Eigen::VectorXd alpha = f.llt.solve(y_centered);
  const double log_det =
      2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  const double n = static_cast<double>(y_centered.size());
  return -0.5 * y_centered.dot(alpha) - 0.5 * log_det -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace

void GpDataset::validate() const {
  if (inputs.size() != targets.size()) {
    throw InvalidInput("GP dataset has " + std::to_string(inputs.size()) +
                       " inputs but " + std::to_string(targets.size()) + " targets");
  }
  if (!std::isfinite(noise_variance) || noise_variance < 0.0) {
    throw InvalidInput("noise variance must be finite and non-negative");
  }
  for (const auto& x : inputs) {
    if (!std::isfinite(x.azimuth) || !std::isfinite(x.elevation)) {
      throw InvalidInput("GP dataset contains a non-finite input");
    }
  }
  for (double y : targets) {
    if (!std::isfinite(y)) throw InvalidInput("GP dataset contains a non-finite target");
  }
}

GpPosterior GpPosterior::fit(GpDataset data, const RbfKernel& kernel) {
  data.validate();
  if (data.size() == 0) {
    throw InvalidInput("cannot fit a GP to an empty dataset; use predict_prior");
  }
  GpPosterior post(std::move(data), kernel);
  post.mean_offset_ = mean_of(post.data_.targets);

  const FlushSubnormals guard;
  Eigen::MatrixXd cov = gram_matrix(kernel, post.data_.inputs);
  cov.diagonal().array() += post.data_.noise_variance;
  const Factor f = factorize(cov, kernel.signal_variance());
  post.jitter_ = f.jitter;
  post.chol_ = f.llt.matrixL();
  post.weights_ = f.llt.solve(centered(post.data_.targets, post.mean_offset_));
  return post;
}

Prediction GpPosterior::predict(const AngularCoordinate& x) const {
  Prediction p;
  predict_chunk({&x, 1}, {&p, 1});
  return p;
}

void GpPosterior::predict(std::span<const AngularCoordinate> xs,
                          std::span<Prediction> out) const {
  if (out.size() != xs.size()) {
    throw InvalidInput("prediction output span size does not match query count");
  }
  for (std::size_t begin = 0; begin < xs.size(); begin += kPredictChunk) {
    const std::size_t n = std::min(kPredictChunk, xs.size() - begin);
    predict_chunk(xs.subspan(begin, n), out.subspan(begin, n));
  }
}

void GpPosterior::predict_chunk(std::span<const AngularCoordinate> xs,
                                std::span<Prediction> out) const {
  const FlushSubnormals guard;
  const std::size_t q_count = xs.size();
  const auto t_count = static_cast<std::size_t>(chol_.rows());
  const auto& inputs = data_.inputs;

  // k[i * q_count + q] = kernel(x_i, query_q); overwritten in place by L^-1 k.
  std::vector<double> k(t_count * q_count);
  for (std::size_t i = 0; i < t_count; ++i) {
    for (std::size_t q = 0; q < q_count; ++q) {
      k[i * q_count + q] = kernel_(inputs[i], xs[q]);
    }
  }

  std::array<double, kPredictChunk> mean{};
  std::array<double, kPredictChunk> explained{};
  for (std::size_t i = 0; i < t_count; ++i) {
    const double w = weights_[static_cast<Eigen::Index>(i)];
    const double* row = &k[i * q_count];
    for (std::size_t q = 0; q < q_count; ++q) mean[q] += row[q] * w;
  }

  // Forward substitution, one row of L at a time, vectorized across queries.
  std::array<double, kPredictChunk> acc{};
  for (std::size_t i = 0; i < t_count; ++i) {
    double* vi = &k[i * q_count];
    for (std::size_t q = 0; q < q_count; ++q) acc[q] = vi[q];
    const double* lrow = chol_.data() + i * t_count;
    for (std::size_t j = 0; j < i; ++j) {
      const double l = lrow[j];
      const double* vj = &k[j * q_count];
      for (std::size_t q = 0; q < q_count; ++q) acc[q] -= l * vj[q];
    }
    const double diag = lrow[i];
    for (std::size_t q = 0; q < q_count; ++q) {
      vi[q] = acc[q] / diag;
      explained[q] += vi[q] * vi[q];
    }
  }

  const double prior = kernel_.signal_variance();
  for (std::size_t q = 0; q < q_count; ++q) {
    out[q].mean = mean_offset_ + mean[q];
    out[q].variance = std::max(0.0, prior - explained[q]);
  }
}

Prediction predict_prior(const RbfKernel& kernel, const AngularCoordinate&,
                         double mean_offset) {
  return {mean_offset, kernel.signal_variance()};
}

double log_marginal_likelihood(const GpDataset& data, const RbfKernel& kernel) {
  data.validate();
  if (data.size() == 0) throw InvalidInput("log marginal likelihood of an empty dataset");
  Eigen::MatrixXd cov = gram_matrix(kernel, data.inputs);
  cov.diagonal().array() += data.noise_variance;
  return lml_from_covariance(std::move(cov), kernel.signal_variance(),
                             centered(data.targets, mean_of(data.targets)));
}

std::vector<double> lengthscale_grid(const LengthscaleBounds& bounds,
                                     std::size_t points) {
  if (!(bounds.min > 0.0) || !(bounds.min < bounds.max) || !std::isfinite(bounds.max)) {
    throw InvalidInput("lengthscale bounds require 0 < min < max");
  }
  if (points == 0) throw InvalidInput("lengthscale grid needs at least one point");
  const double lo = std::log(bounds.min);
  const double hi = std::log(bounds.max);
  if (points == 1) return {std::exp(0.5 * (lo + hi))};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(points - 1));
  }
  grid.front() = bounds.min;
  grid.back() = bounds.max;
  return grid;
}

namespace {

LengthscaleSearch search_impl(const GpDataset& data, const RbfKernel& kernel_template,
                              const LengthscaleBounds& bounds, std::size_t grid_points,
                              std::size_t refine_iterations) {
  data.validate();
  const std::vector<double> grid = lengthscale_grid(bounds, grid_points);
  if (data.size() < 2) {
    return {kernel_template, -std::numeric_limits<double>::infinity(), true};
  }

  const Eigen::MatrixXd d2 = squared_distance_matrix(data.inputs);
  const Eigen::VectorXd y = centered(data.targets, mean_of(data.targets));
  const double sf2 = kernel_template.signal_variance();
  auto objective = [&](double lengthscale) {
    Eigen::MatrixXd cov = gram_matrix(kernel_template.with_lengthscale(lengthscale), d2);
    cov.diagonal().array() += data.noise_variance;
    try {
      return lml_from_covariance(std::move(cov), sf2, y);
    } catch (const DegenerateData&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v >= best_value) {  // >= keeps the largest lengthscale among ties
      best_value = v;
      best = i;
    }
  }
  if (!std::isfinite(best_value)) {
    throw DegenerateData("no lengthscale candidate produced a factorizable covariance",
                         1e-4 * sf2);
  }

  double best_lengthscale = grid[best];
  if (grid.size() > 1 && refine_iterations > 0) {
    // Golden-section search on log(lengthscale) inside the neighbouring bracket.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(grid[best == 0 ? 0 : best - 1]);
    double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(std::exp(c));
    double fd = objective(std::exp(d));
    double refined = fc > fd ? c : d;
    double refined_value = std::max(fc, fd);
    for (std::size_t it = 0; it < refine_iterations; ++it) {
      if (fc < fd) {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(std::exp(d));
        if (fd > refined_value) {
          refined_value = fd;
          refined = d;
        }
      } else {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(std::exp(c));
        if (fc > refined_value) {
          refined_value = fc;
          refined = c;
        }
      }
    }
    if (refined_value > best_value) {
      best_value = refined_value;
      best_lengthscale = std::exp(refined);
    }
  }
  return {kernel_template.with_lengthscale(best_lengthscale), best_value, false};
}

}  // namespace

LengthscaleSearch optimize_lengthscale(const GpDataset& data,
                                       const RbfKernel& kernel_template,
                                       const LengthscaleBounds& bounds,
                                       std::size_t grid_points) {
  return search_impl(data, kernel_template, bounds, grid_points, GpSettings{}.refine_iterations);
}

void GpSettings::validate() const {
  if (!std::isfinite(noise_variance) || noise_variance < 0.0) {
    throw InvalidInput("noise variance must be finite and non-negative");
  }
  lengthscale_grid(bounds, std::max<std::size_t>(grid_points, 1));
  if (grid_points == 0) throw InvalidInput("lengthscale grid needs at least one point");
  if (!std::isfinite(template_lengthscale) || template_lengthscale <= 0.0) {
    throw InvalidInput("template lengthscale must be positive");
  }
  if (template_signal_variance &&
      (!std::isfinite(*template_signal_variance) || *template_signal_variance <= 0.0)) {
    throw InvalidInput("template signal variance must be positive");
  }
}

double empirical_signal_variance(std::span<const double> targets) {
  if (targets.empty()) return kSignalVarianceFloor;
  const double m = mean_of(targets);
  double ss = 0.0;
  for (double y : targets) ss += (y - m) * (y - m);
  return std::max(ss / static_cast<double>(targets.size()), kSignalVarianceFloor);
}

RbfKernel make_template_kernel(const GpSettings& settings,
                               std::span<const double> all_targets) {
  return {settings.template_lengthscale,
          settings.template_signal_variance.value_or(
              empirical_signal_variance(all_targets))};
}

GpPosterior fit_with_search(GpDataset data, const RbfKernel& kernel_template,
                            const GpSettings& settings) {
  data.noise_variance = settings.noise_variance;
  if (data.size() < 2) return GpPosterior::fit(std::move(data), kernel_template);
  const RbfKernel scaled =
      kernel_template.with_signal_variance(empirical_signal_variance(data.targets));
  const LengthscaleSearch search = search_impl(data, scaled, settings.bounds,
                                               settings.grid_points,
                                               settings.refine_iterations);
  return GpPosterior::fit(std::move(data), search.kernel);
}

GpPosterior fit_global(GpDataset data, const GpSettings& settings) {
  settings.validate();
  const RbfKernel tmpl = make_template_kernel(settings, data.targets);
  return fit_with_search(std::move(data), tmpl, settings);
}

}  // namespace radarsplat
