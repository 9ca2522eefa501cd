// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "radarsplat/eval.hpp"
#include "radarsplat/gp.hpp"
#include "radarsplat/localized_gp.hpp"
#include "radarsplat/ply.hpp"
#include "radarsplat/pointcloud.hpp"
#include "radarsplat/scan.hpp"
#include "radarsplat/scene.hpp"
#include "radarsplat/splat.hpp"

using namespace radarsplat;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d. %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs, budget_s, in_time ? "" : " TIMEOUT");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// 1. Factorized GP vs explicit inverse.
Outcome gp_oracle() {
  std::mt19937_64 rng(2024);
  const AngularRange r = default_radar_range();
  std::uniform_real_distribution<double> az(r.azimuth_min, r.azimuth_max);
  std::uniform_real_distribution<double> el(r.elevation_min, r.elevation_max);
  std::uniform_real_distribution<double> depth(5.0, 80.0);
  std::uniform_real_distribution<double> ls(0.05, 0.5);
  std::uniform_real_distribution<double> sf(1.0, 200.0);
  std::uniform_int_distribution<int> size(2, 40);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    GpDataset d;
    const int t = size(rng);
    for (int i = 0; i < t; ++i) {
      d.inputs.push_back({az(rng), el(rng)});
      d.targets.push_back(depth(rng));
    }
    const RbfKernel k(ls(rng), sf(rng));
    const GpPosterior post = GpPosterior::fit(d, k);

    const double m = std::accumulate(d.targets.begin(), d.targets.end(), 0.0) / t;
    Eigen::MatrixXd kxx(t, t);
    Eigen::VectorXd y(t);
    for (int i = 0; i < t; ++i) {
      y[i] = d.targets[i] - m;
      for (int j = 0; j < t; ++j) kxx(i, j) = k(d.inputs[i], d.inputs[j]);
    }
    kxx.diagonal().array() += d.noise_variance + post.jitter();
    const Eigen::MatrixXd inv = kxx.inverse();
    for (int q = 0; q < 50; ++q) {
      const AngularCoordinate x{az(rng), el(rng)};
      Eigen::VectorXd ks(t);
      for (int i = 0; i < t; ++i) ks[i] = k(x, d.inputs[i]);
      const double mu = m + ks.dot(inv * y);
      const double var = k.signal_variance() - ks.dot(inv * ks);
      const Prediction p = post.predict(x);
      worst = std::max({worst, std::abs(p.mean - mu), std::abs(p.variance - var)});
    }
  }
  return {worst <= 1e-8, fmt("max |diff| %.3g (tol 1e-8) over 20 instances", worst)};
}

// 2. One region reproduces the conventional GP.
Outcome degeneracy() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SyntheticScene scene = generate_scene(default_radar_range(), 5, 300 + s, 0.3);
    const SparseDepthScan scan = sample_scan(scene, 400, 400 + s);
    const LocalizedGpModel model =
        fit_localized(scan, RegionPartition(default_radar_range(), 1, 1));
    const GpPosterior global = fit_global(scan.to_dataset(kDefaultNoiseVariance), GpSettings{});
    const auto qs = sample_query_locations(default_radar_range(), 1000, 500 + s);
    const auto a = model.predict_batch(qs);
    std::vector<Prediction> b(qs.size());
    global.predict(qs, b);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      worst = std::max({worst, std::abs(a[i].mean - b[i].mean),
                        std::abs(a[i].variance - b[i].variance)});
    }
  }
  return {worst <= 1e-10, fmt("max |diff| %.3g (tol 1e-10), 5 scans x 1000 queries", worst)};
}

// 3. A perturbed observation only affects its own region.
Outcome locality() {
  const RegionPartition part(default_radar_range(), 6, 2);
  const auto qs = raster_centers(default_radar_range(), 60, 20);
  std::size_t leaks = 0;
  std::size_t silent = 0;
  std::size_t checks = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SyntheticScene scene = generate_scene(default_radar_range(), 5, 600 + s, 0.3);
    const SparseDepthScan scan = sample_scan(scene, 600, 700 + s);
    const auto base = fit_localized(scan, part).predict_batch(qs);
    for (std::size_t r = 0; r < part.region_count(); ++r) {
      SparseDepthScan moved = scan;
      const auto it = std::find_if(moved.records.begin(), moved.records.end(), [&](const auto& o) {
        return part.assign_region(o.direction) == r;
      });
      if (it == moved.records.end()) return {false, "region without observations"};
      it->depth += 3.0;
      const auto after = fit_localized(moved, part).predict_batch(qs);
      bool changed_inside = false;
      for (std::size_t i = 0; i < qs.size(); ++i) {
        ++checks;
        const bool same =
            after[i].mean == base[i].mean && after[i].variance == base[i].variance;
        if (base[i].region == r) {
          changed_inside |= !same;
        } else if (!same) {
          ++leaks;
        }
      }
      if (!changed_inside) ++silent;
    }
  }
  std::ostringstream d;
  d << leaks << " changed predictions outside the perturbed region (of " << checks
    << " compared), " << silent << " perturbations with no effect inside";
  return {leaks == 0 && silent == 0, d.str()};
}

// 4. Speedup of the localized GP at T = 2000, R = 12, 7200 queries.
Outcome speedup() {
  BenchmarkConfig cfg;
  cfg.scan_sizes = {2000};
  cfg.repetitions = 3;
  cfg.seed = 42;
  cfg.methods = {BenchMethod{BenchMethodKind::conventional, {1, 1}, false},
                 BenchMethod{BenchMethodKind::localized, {6, 2}, false},
                 BenchMethod{BenchMethodKind::localized, {6, 2}, true}};
  const auto rows = benchmark(cfg);
  const double conv = rows.at(0).median_total_seconds;
  const double serial = conv / rows.at(1).median_total_seconds;
  const double parallel = conv / rows.at(2).median_total_seconds;
  return {rows.at(0).queries == 7200 && serial >= 4.0 && parallel >= 6.0,
          fmt("conventional %.2f s; serial speedup %.1fx (>= 4), parallel %.1fx (>= 6)", conv,
              serial, parallel)};
}

// 5. Localized MAE beats conventional on piecewise scenes.
Outcome accuracy() {
  int wins = 0;
  double rel = 0.0;
  for (int s = 0; s < 10; ++s) {
    const SyntheticScene scene = generate_scene(default_radar_range(), 5, 1000 + s, 0.3);
    const SparseDepthScan scan = sample_scan(scene, 500, 2000 + s);
    const Comparison c = compare_methods(scan, truth_raster(scene, 180, 40), ComparisonConfig{});
    if (c.localized.mae <= c.conventional.mae) ++wins;
    rel += (c.conventional.mae - c.localized.mae) / c.conventional.mae;
  }
  rel /= 10.0;
  return {wins >= 8 && rel >= 0.05,
          fmt("%.0f/10 wins (>= 8), mean relative improvement %.3f (>= 0.05)", wins, rel)};
}

Eigen::Quaterniond random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

GaussianPrimitive random_gaussian(std::mt19937_64& rng, double zmin, double zmax) {
  std::uniform_real_distribution<double> lateral(-1.5, 1.5);
  std::uniform_real_distribution<double> depth(zmin, zmax);
  std::uniform_real_distribution<double> scale(0.05, 0.4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GaussianPrimitive g;
  g.mean = {lateral(rng), lateral(rng), depth(rng)};
  g.rotation = random_rotation(rng);
  g.scale = {scale(rng), scale(rng), scale(rng)};
  g.opacity = 0.05 + 0.95 * unit(rng);
  g.color = {unit(rng), unit(rng), unit(rng)};
  return g;
}

CameraModel camera32() {
  CameraModel cam;
  cam.fx = cam.fy = 40.0;
  cam.cx = cam.cy = 15.5;
  cam.width = cam.height = 32;
  return cam;
}

// 6. Splat math.
Outcome splat_math() {
  std::mt19937_64 rng(6);
  const CameraModel cam = camera32();

  double peak = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const GaussianPrimitive g = random_gaussian(rng, 0.5, 30.0);
    peak = std::max(peak, std::abs(evaluate_gaussian(g, g.mean) - g.opacity));
  }

  // Random camera poses as well as random primitives.
  double min_eig = std::numeric_limits<double>::infinity();
  std::size_t projected = 0;
  for (int k = 0; k < 10000; ++k) {
    const GaussianPrimitive g = random_gaussian(rng, 0.5, 30.0);
    CameraModel c = cam;
    const Eigen::Matrix3d rot = random_rotation(rng).toRotationMatrix();
    c.extrinsic.leftCols<3>() = rot;
    const Eigen::Vector3d in_view = random_gaussian(rng, 0.5, 30.0).mean;
    c.extrinsic.col(3) = in_view - rot * g.mean;
    const auto p = project_gaussian(g, c);
    if (!p) continue;
    ++projected;
    min_eig = std::min(
        min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(p->cov2d).eigenvalues().minCoeff());
  }

  double jac = 0.0;
  for (int k = 0; k < 100; ++k) {
    jac = std::max(jac, jacobian_check(random_gaussian(rng, 0.5, 30.0), cam, 1e-5));
  }

  double render = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    std::mt19937_64 scene_rng(100 + s);
    std::vector<GaussianPrimitive> gs;
    for (int k = 0; k < 5; ++k) gs.push_back(random_gaussian(scene_rng, 3.0, 12.0));
    const Image fast = render_image(gs, cam);
    std::vector<ProjectedGaussian> splats;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      if (auto p = project_gaussian(gs[i], cam, i)) splats.push_back(*p);
    }
    sort_front_to_back(splats);
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        const Eigen::Vector3d ref = render_pixel(splats, Eigen::Vector2d(x, y));
        render = std::max(render, (fast.pixel(x, y) - ref).cwiseAbs().maxCoeff());
      }
    }
  }

  std::ostringstream d;
  d << "(a) peak err " << peak << " (tol 1e-12); (b) min eig " << min_eig << " over "
    << projected << " projections (>= -1e-9); (c) Jacobian rel err " << jac
    << " (tol 1e-4); (d) render err " << render * 255.0 << "/255 (tol 2/255)";
  return {peak <= 1e-12 && projected == 10000 && min_eig >= -1e-9 && jac <= 1e-4 &&
              render <= 2.0 / 255.0,
          d.str()};
}

// 7. Compositing invariants.
Outcome compositing() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_int_distribution<int> len(1, 24);
  std::size_t monotone = 0, noop = 0, range = 0;
  for (int k = 0; k < 10000; ++k) {
    const int n = len(rng);
    std::vector<ProjectedGaussian> list;
    for (int i = 0; i < n; ++i) {
      ProjectedGaussian s;
      s.mean2d = {pos(rng), pos(rng)};
      const double a = 0.5 + 20.0 * unit(rng);
      const double c = 0.5 + 20.0 * unit(rng);
      const double b = (2.0 * unit(rng) - 1.0) * 0.9 * std::sqrt(a * c);
      s.cov2d << a, b, b, c;
      s.view_depth = 1.0 + 50.0 * unit(rng);
      s.opacity = unit(rng);
      s.color = {unit(rng), unit(rng), unit(rng)};
      s.index = static_cast<std::size_t>(i);
      list.push_back(s);
    }
    sort_front_to_back(list);
    const Eigen::Vector2d p(pos(rng), pos(rng));

    const auto trace = transmittance_trace(list, p);
    bool ok = trace.front() <= 1.0 && trace.back() >= 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) ok &= trace[i] <= trace[i - 1];
    monotone += ok;

    const Eigen::Vector3d color = render_pixel(list, p);
    range += color.minCoeff() >= 0.0 && color.maxCoeff() <= 1.0;

    // Zero-alpha splat (singular footprint) inserted at a random depth slot.
    ProjectedGaussian ghost = list[0];
    ghost.cov2d.setZero();
    ghost.color = {1.0, 1.0, 1.0};
    std::uniform_int_distribution<std::size_t> slot(0, list.size());
    const std::size_t at = slot(rng);
    ghost.view_depth = at == 0 ? list[0].view_depth : list[at - 1].view_depth;
    auto with = list;
    with.insert(with.begin() + static_cast<std::ptrdiff_t>(at), ghost);
    noop += render_pixel(with, p) == color;
  }
  std::ostringstream d;
  d << "monotone " << monotone << "/10000, alpha-0 no-op " << noop << "/10000, in range "
    << range << "/10000";
  return {monotone == 10000 && noop == 10000 && range == 10000, d.str()};
}

// 8. PLY round trip from 1 to 1e6 points.
Outcome ply_round_trip() {
  std::size_t mismatches = 0;
  std::ostringstream sizes;
  for (std::size_t n = 1; n <= 1000000; n *= 10) {
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> pos(-150.0, 150.0);
    std::uniform_int_distribution<int> col(0, 255);
    PointCloud c;
    c.points.resize(n);
    for (auto& p : c.points) {
      p.position = {pos(rng), pos(rng), pos(rng)};
      p.color = {static_cast<std::uint8_t>(col(rng)), static_cast<std::uint8_t>(col(rng)),
                 static_cast<std::uint8_t>(col(rng))};
    }
    for (PlyEncoding e : {PlyEncoding::ascii, PlyEncoding::binary_little_endian}) {
      std::stringstream buf;
      export_ply(c, buf, e);
      const PointCloud back = import_ply(buf);
      if (back.size() != n) {
        ++mismatches;
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& a = c.points[i];
        const auto& b = back.points[i];
        if (b.position.x != static_cast<float>(a.position.x) ||
            b.position.y != static_cast<float>(a.position.y) ||
            b.position.z != static_cast<float>(a.position.z) || b.color != a.color) {
          ++mismatches;
        }
      }
    }
  }
  std::ostringstream d;
  d << mismatches << " mismatched points across 10^0..10^6 in ascii and binary";
  return {mismatches == 0, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. Two CLI invocations give byte-identical outputs.
Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "radarsplat_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const SyntheticScene scene = generate_scene(default_radar_range(), 5, 9, 0.3);
  save_scan(sample_scan(scene, 1000, 10), dir / "scan.csv", ScanFormat::csv);

  const std::string exe = RADARSPLAT_CLI_PATH;
  std::vector<std::string> files;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("run" + std::to_string(run));
    for (const char* cmd : {"reconstruct", "pointcloud"}) {
      const std::string line = exe + " " + cmd + " -i " + (dir / "scan.csv").string() +
                               " -o " + out.string() + " --seed 5 --parallel > " +
                               (dir / "log.txt").string() + " 2>&1";
      if (std::system(line.c_str()) != 0) return {false, std::string(cmd) + " failed"};
    }
  }
  std::size_t compared = 0;
  std::size_t differ = 0;
  for (const char* f : {"depth_mean.csv", "depth_variance.csv", "pointcloud.ply"}) {
    const std::string a = slurp(dir / "run0" / f);
    const std::string b = slurp(dir / "run1" / f);
    ++compared;
    if (a.empty() || a != b) ++differ;
  }
  std::ostringstream d;
  d << differ << " of " << compared << " output files differ between runs";
  return {differ == 0, d.str()};
}

}  // namespace

int main() {
  criterion(1, "GP matches explicit-inverse posterior", 5, gp_oracle);
  criterion(2, "single region equals conventional GP", 10, degeneracy);
  criterion(3, "perturbations stay in their region", 30, locality);
  criterion(4, "localized speedup", 180, speedup);
  criterion(5, "localized accuracy on piecewise scenes", 300, accuracy);
  criterion(6, "splat math", 60, splat_math);
  criterion(7, "compositing invariants", 30, compositing);
  criterion(8, "PLY round trip", 60, ply_round_trip);
  criterion(9, "end-to-end reproducibility", 60, reproducibility);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
