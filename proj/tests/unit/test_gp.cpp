#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <doctest.h>

#include "radarsplat/errors.hpp"
#include "radarsplat/gp.hpp"

using namespace radarsplat;

namespace {

GpDataset random_dataset(std::size_t n, std::uint64_t seed, double noise = 0.04) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> az(-1.0, 1.0), el(-0.3, 0.3), y(20.0, 60.0);
  GpDataset d;
  d.noise_variance = noise;
  for (std::size_t i = 0; i < n; ++i) {
    d.inputs.push_back({az(rng), el(rng)});
    d.targets.push_back(y(rng));
  }
  return d;
}

// Direct evaluation of the posterior with an explicit inverse of K + s I.
struct DenseOracle {
  Eigen::MatrixXd k_inv;
  Eigen::VectorXd y_centered;
  double offset;
  RbfKernel kernel;
  std::vector<AngularCoordinate> xs;

  DenseOracle(const GpDataset& d, const RbfKernel& k, double jitter) : kernel(k), xs(d.inputs) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = k(d.inputs[i], d.inputs[j]);
    }
    cov.diagonal().array() += d.noise_variance + jitter;
    k_inv = cov.inverse();
    offset = std::accumulate(d.targets.begin(), d.targets.end(), 0.0) / static_cast<double>(n);
    y_centered.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) y_centered[i] = d.targets[i] - offset;
  }

  Prediction operator()(const AngularCoordinate& x) const {
    Eigen::VectorXd ks(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) ks[static_cast<Eigen::Index>(i)] = kernel(xs[i], x);
    return {offset + ks.dot(k_inv * y_centered), kernel(x, x) - ks.dot(k_inv * ks)};
  }
};

double dense_lml(const GpDataset& d, const RbfKernel& k) {
  const DenseOracle o(d, k, 0.0);
  const Eigen::MatrixXd cov = o.k_inv.inverse();
  const double det = cov.fullPivLu().determinant();
  const double n = static_cast<double>(d.size());
  return -0.5 * o.y_centered.dot(o.k_inv * o.y_centered) - 0.5 * std::log(det) -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace

TEST_SUITE("gp_core") {

TEST_CASE("posterior matches the explicit-inverse oracle on 20 instances") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 5 + seed * 7 % 36;
    const GpDataset d = random_dataset(n, seed);
    const RbfKernel k(0.05 + 0.02 * static_cast<double>(seed), 30.0);
    const GpPosterior post = GpPosterior::fit(d, k);
    const DenseOracle oracle(d, k, post.jitter());
    std::mt19937_64 rng(100 + seed);
    std::uniform_real_distribution<double> az(-1.2, 1.2), el(-0.4, 0.4);
    for (int q = 0; q < 50; ++q) {
      const AngularCoordinate x{az(rng), el(rng)};
      const Prediction p = post.predict(x);
      const Prediction o = oracle(x);
      worst = std::max({worst, std::abs(p.mean - o.mean),
                        std::abs(p.variance - std::max(0.0, o.variance))});
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("weights match a dense solve and the factor reconstructs the covariance") {
  const GpDataset d = random_dataset(30, 42);
  const RbfKernel k(0.2, 50.0);
  const GpPosterior post = GpPosterior::fit(d, k);
  const DenseOracle oracle(d, k, post.jitter());
  const Eigen::VectorXd w = oracle.k_inv * oracle.y_centered;
  CHECK((post.weights() - w).norm() / w.norm() <= 1e-8);

  Eigen::MatrixXd cov = gram_matrix(k, d.inputs);
  cov.diagonal().array() += d.noise_variance + post.jitter();
  const Eigen::MatrixXd l = post.cholesky();
  CHECK((l * l.transpose() - cov).norm() / cov.norm() <= 1e-8);
  CHECK(l.isLowerTriangular());
  const Eigen::VectorXd residual = cov * post.weights() - oracle.y_centered;
  CHECK(residual.norm() / oracle.y_centered.norm() <= 1e-8);
  CHECK(post.mean_offset() == doctest::Approx(oracle.offset).epsilon(1e-15));
}

TEST_CASE("noiseless interpolation") {
  GpDataset one;
  one.noise_variance = 0.0;
  one.inputs = {{0.1, 0.05}};
  one.targets = {17.25};
  const GpPosterior p1 = GpPosterior::fit(one, RbfKernel(0.1, 4.0));
  const Prediction at = p1.predict({0.1, 0.05});
  CHECK(std::abs(at.mean - 17.25) <= 1e-10);
  CHECK(at.variance <= 1e-6);

  GpDataset d = random_dataset(8, 9, 0.0);
  const GpPosterior post = GpPosterior::fit(d, RbfKernel(0.1, 100.0));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Prediction p = post.predict(d.inputs[i]);
    CHECK(std::abs(p.mean - d.targets[i]) <= 1e-6);
    CHECK(p.variance <= 1e-6);
  }
}

TEST_CASE("far from the data the posterior reverts to the prior") {
  const GpDataset d = random_dataset(20, 3);
  const RbfKernel k(0.02, 9.0);
  const GpPosterior post = GpPosterior::fit(d, k);
  const Prediction p = post.predict({3.0, 1.4});
  CHECK(std::abs(p.mean - post.mean_offset()) <= 1e-6);
  CHECK(std::abs(p.variance - 9.0) <= 1e-6);
}

TEST_CASE("predict_prior") {
  const Prediction a = predict_prior(RbfKernel(0.3, 1.0), {0.0, 0.0}, 0.0);
  CHECK(a.mean == 0.0);
  CHECK(a.variance == 1.0);
  const RbfKernel k(0.3, 4.0);
  const Prediction b = predict_prior(k, {0.5, -0.1}, 12.5);
  CHECK(b.mean == 12.5);
  CHECK(b.variance == 4.0);
  const Prediction c = predict_prior(k, {-1.1, 0.3}, 12.5);
  CHECK(c.mean == b.mean);
  CHECK(c.variance == b.variance);
}

TEST_CASE("fit rejects an empty dataset") {
  GpDataset empty;
  CHECK_THROWS_AS(GpPosterior::fit(empty, RbfKernel(0.1, 1.0)), InvalidInput);
  CHECK_THROWS_AS(log_marginal_likelihood(empty, RbfKernel(0.1, 1.0)), InvalidInput);
  GpDataset bad = random_dataset(3, 1);
  bad.targets.pop_back();
  CHECK_THROWS_AS(GpPosterior::fit(bad, RbfKernel(0.1, 1.0)), InvalidInput);
  bad = random_dataset(3, 1);
  bad.noise_variance = -1.0;
  CHECK_THROWS_AS(GpPosterior::fit(bad, RbfKernel(0.1, 1.0)), InvalidInput);
}

TEST_CASE("coincident noiseless inputs are rescued by jitter") {
  GpDataset d;
  d.noise_variance = 0.0;
  d.inputs = {{0.1, 0.1}, {0.1, 0.1}, {0.3, 0.0}};
  d.targets = {10.0, 10.5, 12.0};
  const GpPosterior post = GpPosterior::fit(d, RbfKernel(0.2, 2.0));
  CHECK(post.jitter() > 0.0);
  CHECK(post.jitter() <= 1e-4 * 2.0 * (1 + 1e-12));
  const Prediction p = post.predict({0.1, 0.1});
  CHECK(std::isfinite(p.mean));
  CHECK(p.variance >= 0.0);
}

TEST_CASE("property: variance bounds, permutation invariance and information gain") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GpDataset d = random_dataset(25, 200 + seed);
    const RbfKernel k(0.15, 40.0);
    const GpPosterior post = GpPosterior::fit(d, k);

    std::vector<std::size_t> perm(d.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(seed));
    GpDataset shuffled;
    shuffled.noise_variance = d.noise_variance;
    for (std::size_t i : perm) {
      shuffled.inputs.push_back(d.inputs[i]);
      shuffled.targets.push_back(d.targets[i]);
    }
    const GpPosterior post_perm = GpPosterior::fit(shuffled, k);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> az(-1.2, 1.2), el(-0.4, 0.4), y(20.0, 60.0);
    for (int q = 0; q < 40; ++q) {
      const AngularCoordinate x{az(rng), el(rng)};
      const Prediction p = post.predict(x);
      CHECK(p.variance >= 0.0);
      CHECK(p.variance <= 40.0 + 1e-8);
      const Prediction pp = post_perm.predict(x);
      CHECK(std::abs(p.mean - pp.mean) <= 1e-10);
      CHECK(std::abs(p.variance - pp.variance) <= 1e-10);

      GpDataset more = d;
      more.inputs.push_back(x);
      more.targets.push_back(y(rng));
      const Prediction after = GpPosterior::fit(more, k).predict(x);
      CHECK(after.variance <= p.variance + 1e-8);
    }
  }
}

TEST_CASE("batched prediction is bitwise identical to single queries") {
  const GpDataset d = random_dataset(37, 77);
  const GpPosterior post = GpPosterior::fit(d, RbfKernel(0.12, 25.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> az(-1.0, 1.0), el(-0.3, 0.3);
  std::vector<AngularCoordinate> xs(100);
  for (auto& x : xs) x = {az(rng), el(rng)};
  std::vector<Prediction> all(xs.size());
  post.predict(xs, all);
  for (std::size_t len : {1u, 31u, 33u, 64u}) {
    std::vector<Prediction> part(len);
    post.predict(std::span(xs).subspan(3, len), part);
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(part[i].mean == all[3 + i].mean);
      CHECK(part[i].variance == all[3 + i].variance);
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Prediction p = post.predict(xs[i]);
    CHECK(p.mean == all[i].mean);
    CHECK(p.variance == all[i].variance);
  }
}

TEST_CASE("log marginal likelihood: scalar case") {
  GpDataset d;
  d.noise_variance = 0.5;
  d.inputs = {{0.0, 0.0}};
  d.targets = {3.0};
  const RbfKernel k(0.2, 2.0);
  // Centered target is 0, s = 2.5.
  const double s = 2.5;
  const double expected = -0.5 * std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
  CHECK(std::abs(log_marginal_likelihood(d, k) - expected) <= 1e-12);
}

TEST_CASE("log marginal likelihood matches the dense determinant formula") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GpDataset d = random_dataset(20, 500 + seed, 0.5);
    const RbfKernel k(0.1 + 0.1 * static_cast<double>(seed), 60.0);
    const double ours = log_marginal_likelihood(d, k);
    const double dense = dense_lml(d, k);
    CHECK(std::abs(ours - dense) <= 1e-8 * std::max(1.0, std::abs(dense)));
  }
}

TEST_CASE("log marginal likelihood decreases once the noise dominates") {
  GpDataset d = random_dataset(15, 8);
  const RbfKernel k(0.2, 60.0);
  double prev = INFINITY;
  for (double noise : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    d.noise_variance = noise;
    const double v = log_marginal_likelihood(d, k);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("lengthscale grid") {
  const auto g = lengthscale_grid({1e-3, 2.0}, 32);
  REQUIRE(g.size() == 32);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 2.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(std::log(g[i] / g[i - 1]) == doctest::Approx(std::log(2000.0) / 31).epsilon(1e-12));
  }
  const auto one = lengthscale_grid({1e-3, 2.0}, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(std::sqrt(2e-3)).epsilon(1e-14));
  CHECK_THROWS_AS(lengthscale_grid({0.0, 1.0}, 4), InvalidInput);
  CHECK_THROWS_AS(lengthscale_grid({1.0, 1.0}, 4), InvalidInput);
  CHECK_THROWS_AS(lengthscale_grid({1e-3, 1.0}, 0), InvalidInput);
}

TEST_CASE("lengthscale recovery from a sampled GP") {
  // Draw y ~ GP(0, k*) with l* = 0.1 at 200 random inputs, then search.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> az(-1.0, 1.0), el(-0.35, 0.35);
  std::normal_distribution<double> n01;
  GpDataset d;
  d.noise_variance = 1e-4;
  for (int i = 0; i < 200; ++i) d.inputs.push_back({az(rng), el(rng)});
  Eigen::MatrixXd cov = gram_matrix(RbfKernel(0.1, 1.0), d.inputs);
  cov.diagonal().array() += 1e-8;
  const Eigen::MatrixXd l = cov.llt().matrixL();
  Eigen::VectorXd z(200);
  for (auto& v : z) v = n01(rng);
  const Eigen::VectorXd f = l * z;
  for (int i = 0; i < 200; ++i) d.targets.push_back(30.0 + f[i] + 0.01 * n01(rng));

  const RbfKernel tmpl(0.5, empirical_signal_variance(d.targets));
  const LengthscaleSearch s = optimize_lengthscale(d, tmpl, {1e-3, 2.0}, 32);
  CHECK_FALSE(s.insufficient_data);
  CHECK(s.kernel.lengthscale() >= 0.05);
  CHECK(s.kernel.lengthscale() <= 0.2);
  CHECK(s.kernel.signal_variance() == tmpl.signal_variance());

  // The search result is at least as good as every grid candidate.
  CHECK(s.log_likelihood == log_marginal_likelihood(d, s.kernel));
  for (double ell : lengthscale_grid({1e-3, 2.0}, 32)) {
    CHECK(s.log_likelihood >= log_marginal_likelihood(d, tmpl.with_lengthscale(ell)));
  }
}

TEST_CASE("lengthscale search degenerate cases") {
  const RbfKernel tmpl(0.1, 1.0);
  GpDataset flat = random_dataset(10, 4);
  std::fill(flat.targets.begin(), flat.targets.end(), 25.0);
  CHECK(optimize_lengthscale(flat, tmpl, {1e-3, 2.0}, 32).kernel.lengthscale() == 2.0);

  const GpDataset d = random_dataset(10, 4);
  const LengthscaleSearch one = optimize_lengthscale(d, tmpl, {1e-3, 2.0}, 1);
  CHECK(one.kernel.lengthscale() == lengthscale_grid({1e-3, 2.0}, 1)[0]);

  const GpDataset single = random_dataset(1, 4);
  const LengthscaleSearch s = optimize_lengthscale(single, tmpl, {1e-3, 2.0}, 32);
  CHECK(s.insufficient_data);
  CHECK(s.kernel == tmpl);
}

TEST_CASE("hyperparameter policy") {
  const GpDataset d = random_dataset(40, 12);
  GpSettings settings;
  const GpPosterior global = fit_global(d, settings);
  CHECK(global.kernel().signal_variance() == empirical_signal_variance(d.targets));
  const RbfKernel tmpl = make_template_kernel(settings, d.targets);
  CHECK(tmpl.lengthscale() == 0.1);
  CHECK(tmpl.signal_variance() == empirical_signal_variance(d.targets));
  const GpPosterior same = fit_with_search(d, tmpl, settings);
  CHECK(same.kernel() == global.kernel());

  const GpDataset one = random_dataset(1, 12);
  const GpPosterior single = fit_with_search(one, tmpl, settings);
  CHECK(single.kernel() == tmpl);

  settings.template_signal_variance = 7.0;
  CHECK(make_template_kernel(settings, d.targets).signal_variance() == 7.0);

  const std::vector<double> constant(5, 3.0);
  CHECK(empirical_signal_variance(constant) == kSignalVarianceFloor);

  GpSettings bad;
  bad.noise_variance = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = {};
  bad.bounds = {1.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = {};
  bad.template_lengthscale = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

}  // TEST_SUITE
