#include "radarsplat/splat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <iterator>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "radarsplat/errors.hpp"
#include "radarsplat/parallel.hpp"

namespace radarsplat {

void GaussianPrimitive::validate() const {
  if (std::abs(rotation.norm() - 1.0) > 1e-9) {
    throw InvalidInput("gaussian rotation quaternion is not unit length");
  }
  if (!mean.allFinite() || !scale.allFinite() || !(scale.array() > 0.0).all()) {
    throw InvalidInput("gaussian scales must be finite and positive");
  }
  if (!(opacity > 0.0 && opacity <= 1.0)) {
    throw InvalidInput("gaussian opacity must lie in (0, 1]");
  }
}

Eigen::Matrix3d GaussianPrimitive::covariance() const {
  return covariance_from_factors(rotation, scale);
}

Eigen::Matrix3d covariance_from_factors(const Eigen::Quaterniond& rotation,
                                        const Eigen::Vector3d& scale) {
  const Eigen::Matrix3d m = rotation.toRotationMatrix() * scale.asDiagonal();
  const Eigen::Matrix3d sigma = m * m.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

double evaluate_gaussian(const GaussianPrimitive& g, const Eigen::Vector3d& z) {
  // Sigma^-1 = R S^-2 R^T, so the quadratic form is |S^-1 R^T d|^2.
  const Eigen::Vector3d local =
      (g.rotation.toRotationMatrix().transpose() * (z - g.mean)).cwiseQuotient(g.scale);
  return g.opacity * std::exp(-0.5 * local.squaredNorm());
}

Eigen::Matrix3d CameraModel::intrinsic() const {
  Eigen::Matrix3d l;
  l << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return l;
}

void CameraModel::validate() const {
  const Eigen::Matrix3d r = rotation();
  if (!extrinsic.allFinite() ||
      (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-8) {
    throw InvalidInput("camera extrinsic rotation block is not orthonormal");
  }
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(cx) || !std::isfinite(cy)) {
    throw InvalidInput("camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) throw InvalidInput("camera image size must be positive");
}

CameraModel parse_camera_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed camera JSON: ") + e.what(), e.byte);
  }
  CameraModel cam;
  try {
    const auto& ext = doc.at("extrinsic");
    if (!ext.is_array() || ext.size() != 12) {
      throw InvalidInput("camera 'extrinsic' must hold 12 numbers");
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) cam.extrinsic(i, j) = ext.at(4 * i + j).get<double>();
    }
    const auto& in = doc.at("intrinsic");
    if (in.is_array()) {
      if (in.size() != 4) throw InvalidInput("camera 'intrinsic' must hold fx, fy, cx, cy");
      cam.fx = in[0].get<double>();
      cam.fy = in[1].get<double>();
      cam.cx = in[2].get<double>();
      cam.cy = in[3].get<double>();
    } else {
      cam.fx = in.at("fx").get<double>();
      cam.fy = in.at("fy").get<double>();
      cam.cx = in.at("cx").get<double>();
      cam.cy = in.at("cy").get<double>();
    }
    cam.width = doc.at("width").get<int>();
    cam.height = doc.at("height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("invalid camera JSON: ") + e.what());
  }
  cam.validate();
  return cam;
}

CameraModel load_camera(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open camera file " + path.string());
  return parse_camera_json(
      std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraModel& cam,
                                                const Eigen::Vector3d& t) {
  const double iz = 1.0 / t.z();
  const double iz2 = iz * iz;
  Eigen::Matrix<double, 2, 3> j;
  j << cam.fx * iz, 0.0, -cam.fx * t.x() * iz2,
       0.0, cam.fy * iz, -cam.fy * t.y() * iz2;
  return j;
}

std::optional<ProjectedGaussian> project_gaussian(const GaussianPrimitive& g,
                                                  const CameraModel& cam,
                                                  std::size_t index) {
  const Eigen::Vector3d t = cam.to_camera(g.mean);
  if (t.z() <= kNearPlane) return std::nullopt;
  const Eigen::Vector3d ulb = cam.intrinsic() * t;

  ProjectedGaussian p;
  p.mean2d = {ulb.x() / ulb.z(), ulb.y() / ulb.z()};
  const Eigen::Matrix<double, 2, 3> jw = projection_jacobian(cam, t) * cam.rotation();
  const Eigen::Matrix2d cov = jw * g.covariance() * jw.transpose();
  p.cov2d = 0.5 * (cov + cov.transpose());
  p.view_depth = t.z();
  p.opacity = g.opacity;
  p.color = g.color;
  p.index = index;
  return p;
}

double splat_alpha(const ProjectedGaussian& s, const Eigen::Vector2d& p) {
  const double a = s.cov2d(0, 0);
  const double b = s.cov2d(0, 1);
  const double c = s.cov2d(1, 1);
  const double det = a * c - b * b;
  if (!(det > 0.0)) return 0.0;
  const Eigen::Vector2d d = p - s.mean2d;
  const double power = -0.5 * (c * d.x() * d.x() - 2.0 * b * d.x() * d.y() + a * d.y() * d.y()) / det;
  return std::clamp(s.opacity * std::exp(power), 0.0, kMaxSplatAlpha);
}

namespace {

[[maybe_unused]] bool sorted_front_to_back(std::span<const ProjectedGaussian> s) {
  return std::is_sorted(s.begin(), s.end(), [](const auto& a, const auto& b) {
    return a.view_depth < b.view_depth;
  });
}

}  // namespace

Eigen::Vector3d render_pixel(std::span<const ProjectedGaussian> sorted,
                             const Eigen::Vector2d& p) {
  assert(sorted_front_to_back(sorted) && "splats must be sorted by view depth");
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double transmittance = 1.0;
  for (const auto& s : sorted) {
    const double alpha = splat_alpha(s, p);
    color += s.color * (alpha * transmittance);
    transmittance *= 1.0 - alpha;
  }
  return color;
}

std::vector<double> transmittance_trace(std::span<const ProjectedGaussian> sorted,
                                        const Eigen::Vector2d& p) {
  std::vector<double> trace;
  trace.reserve(sorted.size());
  double transmittance = 1.0;
  for (const auto& s : sorted) {
    transmittance *= 1.0 - splat_alpha(s, p);
    trace.push_back(transmittance);
  }
  return trace;
}

void sort_front_to_back(std::vector<ProjectedGaussian>& splats) {
  std::sort(splats.begin(), splats.end(), [](const auto& a, const auto& b) {
    if (a.view_depth != b.view_depth) return a.view_depth < b.view_depth;
    return a.index < b.index;
  });
}

namespace {

constexpr int kTile = 16;

struct Footprint {
  int x0, y0, x1, y1;  // inclusive pixel bounds
};

}  // namespace

Image render_image(std::span<const GaussianPrimitive> gaussians, const CameraModel& cam,
                   std::size_t threads) {
  cam.validate();
  Image img{cam.width, cam.height,
            std::vector<double>(3 * static_cast<std::size_t>(cam.width) * cam.height, 0.0)};

  std::vector<ProjectedGaussian> splats;
  splats.reserve(gaussians.size());
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    if (auto p = project_gaussian(gaussians[i], cam, i)) splats.push_back(*p);
  }
  sort_front_to_back(splats);

  const int tiles_x = (cam.width + kTile - 1) / kTile;
  const int tiles_y = (cam.height + kTile - 1) / kTile;
  std::vector<std::vector<std::size_t>> tile_lists(static_cast<std::size_t>(tiles_x) * tiles_y);
  std::vector<Footprint> footprints(splats.size());
  for (std::size_t s = 0; s < splats.size(); ++s) {
    const auto& sp = splats[s];
    const double lambda_max =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(sp.cov2d, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .maxCoeff();
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) continue;
    const double radius = std::ceil(3.0 * std::sqrt(lambda_max));
    const double fx0 = std::ceil(sp.mean2d.x() - radius);
    const double fy0 = std::ceil(sp.mean2d.y() - radius);
    const double fx1 = std::floor(sp.mean2d.x() + radius);
    const double fy1 = std::floor(sp.mean2d.y() + radius);
    if (fx1 < 0.0 || fy1 < 0.0 || fx0 > cam.width - 1 || fy0 > cam.height - 1) continue;
    Footprint f{static_cast<int>(std::max(fx0, 0.0)), static_cast<int>(std::max(fy0, 0.0)),
                static_cast<int>(std::min(fx1, cam.width - 1.0)),
                static_cast<int>(std::min(fy1, cam.height - 1.0))};
    footprints[s] = f;
    for (int ty = f.y0 / kTile; ty <= f.y1 / kTile; ++ty) {
      for (int tx = f.x0 / kTile; tx <= f.x1 / kTile; ++tx) {
        tile_lists[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(s);
      }
    }
  }

  parallel_for(tile_lists.size(), threads, [&](std::size_t t) {
    const int tx = static_cast<int>(t % tiles_x);
    const int ty = static_cast<int>(t / tiles_x);
    const auto& list = tile_lists[t];
    for (int y = ty * kTile; y < std::min((ty + 1) * kTile, cam.height); ++y) {
      for (int x = tx * kTile; x < std::min((tx + 1) * kTile, cam.width); ++x) {
        const Eigen::Vector2d p(x, y);
        Eigen::Vector3d color = Eigen::Vector3d::Zero();
        double transmittance = 1.0;
        for (std::size_t s : list) {
          const Footprint& f = footprints[s];
          if (x < f.x0 || x > f.x1 || y < f.y0 || y > f.y1) continue;
          const double alpha = splat_alpha(splats[s], p);
          color += splats[s].color * (alpha * transmittance);
          transmittance *= 1.0 - alpha;
        }
        const std::size_t k = 3 * (static_cast<std::size_t>(y) * cam.width + x);
        img.rgb[k] = color.x();
        img.rgb[k + 1] = color.y();
        img.rgb[k + 2] = color.z();
      }
    }
  });
  return img;
}

double jacobian_check(const GaussianPrimitive& g, const CameraModel& cam, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInput("finite-difference step must be positive");
  }
  const Eigen::Vector3d t = cam.to_camera(g.mean);
  const Eigen::Matrix3d l = cam.intrinsic();
  auto project = [&](const Eigen::Vector3d& pt) -> Eigen::Vector2d {
    const Eigen::Vector3d ulb = l * pt;
    return {ulb.x() / ulb.z(), ulb.y() / ulb.z()};
  };
  const Eigen::Matrix<double, 2, 3> analytic = projection_jacobian(cam, t);
  Eigen::Matrix<double, 2, 3> numeric;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d h = Eigen::Vector3d::Zero();
    h[k] = step;
    numeric.col(k) = (project(t + h) - project(t - h)) / (2.0 * step);
  }
  const double scale = analytic.cwiseAbs().maxCoeff();
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace radarsplat
