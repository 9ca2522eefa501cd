#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace radarsplat {

/// One anisotropic 3D Gaussian: density opacity * exp(-0.5 d^T Sigma^-1 d) with
/// Sigma = R S S^T R^T, R from the unit quaternion and S = diag(scale).
struct GaussianPrimitive {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();
  double opacity = 1.0;
  Eigen::Vector3d color = Eigen::Vector3d::Ones();  // RGB in [0, 1]

  /// Throws InvalidInput unless |q| = 1 (1e-9), scales > 0, opacity in (0, 1].
  void validate() const;
  Eigen::Matrix3d covariance() const;
};

Eigen::Matrix3d covariance_from_factors(const Eigen::Quaterniond& rotation,
                                        const Eigen::Vector3d& scale);

double evaluate_gaussian(const GaussianPrimitive& g, const Eigen::Vector3d& z);

/// Pinhole camera. `extrinsic` maps world to camera coordinates as [R | t];
/// the camera looks down +z, pixel coordinates are (fx x/z + cx, fy y/z + cy)
/// and pixel (i, j) of an image is sampled at exactly (i, j).
struct CameraModel {
  Eigen::Matrix<double, 3, 4> extrinsic = Eigen::Matrix<double, 3, 4>::Identity();
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  Eigen::Matrix3d rotation() const { return extrinsic.leftCols<3>(); }
  Eigen::Vector3d translation() const { return extrinsic.col(3); }
  Eigen::Matrix3d intrinsic() const;
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation() * world + translation();
  }

  /// Throws InvalidInput unless the rotation block is orthonormal (1e-8),
  /// fx, fy > 0 and the image has a positive size.
  void validate() const;
};

/// JSON object with `extrinsic` (12 numbers, row-major 3x4), `intrinsic`
/// ([fx, fy, cx, cy] or an object with those keys), `width`, `height`.
CameraModel load_camera(const std::filesystem::path& path);
CameraModel parse_camera_json(const std::string& json_text);

inline constexpr double kNearPlane = 0.01;
inline constexpr double kMaxSplatAlpha = 0.999;

struct ProjectedGaussian {
  Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov2d = Eigen::Matrix2d::Identity();
  double view_depth = 1.0;
  double opacity = 1.0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  /// Position in the source list; secondary sort key.
  std::size_t index = 0;
};

/// d(pixel)/d(camera point) of the perspective map at a camera-space point.
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraModel& cam,
                                                const Eigen::Vector3d& camera_point);

/// EWA projection: mean through L [R | t], covariance J R Sigma R^T J^T.
/// Returns nullopt when the mean is at or behind the near plane.
std::optional<ProjectedGaussian> project_gaussian(const GaussianPrimitive& g,
                                                  const CameraModel& cam,
                                                  std::size_t index = 0);

/// 2D splat weight at pixel p: opacity * exp(-0.5 d^T cov2d^-1 d), clamped to
/// [0, kMaxSplatAlpha]. Zero for a singular cov2d.
double splat_alpha(const ProjectedGaussian& s, const Eigen::Vector2d& p);

/// Front-to-back compositing of splats sorted by ascending view depth;
/// background is black.
Eigen::Vector3d render_pixel(std::span<const ProjectedGaussian> sorted,
                             const Eigen::Vector2d& p);

/// Transmittance after each prefix: entry k is prod_{j<=k} (1 - alpha_j).
std::vector<double> transmittance_trace(std::span<const ProjectedGaussian> sorted,
                                        const Eigen::Vector2d& p);

/// Sort by (view_depth, index).
void sort_front_to_back(std::vector<ProjectedGaussian>& splats);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  // interleaved, row-major, [0, 1]

  Eigen::Vector3d pixel(int x, int y) const {
    const std::size_t k = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
  }
};

/// Projects, sorts and composites every pixel over the splats whose 3-sigma
/// footprint covers it. Output does not depend on `threads`.
Image render_image(std::span<const GaussianPrimitive> gaussians, const CameraModel& cam,
                   std::size_t threads = 1);

/// Max |J_analytic - J_fd| / max |J_analytic| with central differences of the
/// projection map at the camera-space mean. Throws InvalidInput for step <= 0.
double jacobian_check(const GaussianPrimitive& g, const CameraModel& cam, double step);

}  // namespace radarsplat
