#include "radarsplat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "radarsplat/errors.hpp"

namespace radarsplat {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
}  // namespace

double Point3::norm() const { return std::sqrt(x * x + y * y + z * z); }

AngularRange AngularRange::from_degrees(double az_min, double az_max,
                                        double el_min, double el_max) {
  return {deg_to_rad(az_min), deg_to_rad(az_max), deg_to_rad(el_min),
          deg_to_rad(el_max)};
}

bool AngularRange::contains(const AngularCoordinate& x) const {
  return x.azimuth >= azimuth_min && x.azimuth <= azimuth_max &&
         x.elevation >= elevation_min && x.elevation <= elevation_max;
}

AngularCoordinate AngularRange::center() const {
  return {0.5 * (azimuth_min + azimuth_max),
          0.5 * (elevation_min + elevation_max)};
}

AngularRange default_radar_range() {
  return AngularRange::from_degrees(-90.0, 90.0, -20.0, 20.0);
}

std::optional<double> parse_degrees(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return std::nullopt;
  const auto last = text.find_last_not_of(" \t\r");
  const std::string field(text.substr(first, last - first + 1));
  char* end = nullptr;
  const long double deg = std::strtold(field.c_str(), &end);
  if (end != field.c_str() + field.size()) return std::nullopt;
  return deg_to_rad(deg);
}

std::string format_degrees(double rad) {
  char buf[64];
  if (!std::isfinite(rad)) {
    std::snprintf(buf, sizeof(buf), "%g", rad);
    return buf;
  }
  // Long doubles are ~2^11 times denser than doubles, so a preimage sits a
  // few steps from the first guess.
  long double exact = static_cast<long double>(rad) * (180.0L / std::numbers::pi_v<long double>);
  if (deg_to_rad(exact) != rad) {
    long double up = exact;
    long double down = exact;
    for (int i = 0; i < 1 << 14; ++i) {
      up = std::nextafter(up, HUGE_VALL);
      down = std::nextafter(down, -HUGE_VALL);
      if (deg_to_rad(up) == rad) {
        exact = up;
        break;
      }
      if (deg_to_rad(down) == rad) {
        exact = down;
        break;
      }
    }
  }
  for (int digits = 1; digits <= 21; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*Le", digits - 1, exact);
    if (parse_degrees(buf) != rad) continue;
    // Same digits in positional notation when the exponent is moderate.
    const int exponent = std::atoi(std::strchr(buf, 'e') + 1);
    if (exponent >= -5 && exponent <= 20) {
      char fixed[64];
      std::snprintf(fixed, sizeof(fixed), "%.*Lf", std::max(0, digits - 1 - exponent),
                    std::strtold(buf, nullptr));
      if (parse_degrees(fixed) == rad) return fixed;
    }
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.21Lg", exact);
  return buf;
}

void validate(const AngularCoordinate& x) {
  if (!std::isfinite(x.azimuth) || !std::isfinite(x.elevation)) {
    throw InvalidInput("angular coordinate is not finite");
  }
  if (x.azimuth < -kPi || x.azimuth > kPi) {
    throw InvalidInput("azimuth " + std::to_string(x.azimuth) +
                       " rad outside [-pi, pi]");
  }
  if (x.elevation < -kHalfPi || x.elevation > kHalfPi) {
    throw InvalidInput("elevation " + std::to_string(x.elevation) +
                       " rad outside [-pi/2, pi/2]");
  }
}

void validate(const AngularRange& r) {
  validate(AngularCoordinate{r.azimuth_min, r.elevation_min});
  validate(AngularCoordinate{r.azimuth_max, r.elevation_max});
  if (!(r.azimuth_min < r.azimuth_max) || !(r.elevation_min < r.elevation_max)) {
    throw InvalidInput("angular range requires min < max on both axes");
  }
}

Point3 spherical_to_cartesian(const AngularCoordinate& direction, double depth) {
  if (!std::isfinite(depth) || depth <= 0.0) {
    throw InvalidInput("depth must be finite and positive, got " +
                       std::to_string(depth));
  }
  validate(direction);
  const double ce = std::cos(direction.elevation);
  return {depth * ce * std::cos(direction.azimuth),
          depth * ce * std::sin(direction.azimuth),
          depth * std::sin(direction.elevation)};
}

SphericalPoint cartesian_to_spherical(const Point3& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw InvalidInput("point is not finite");
  }
  const double horizontal = std::hypot(p.x, p.y);
  const double depth = std::hypot(horizontal, p.z);
  if (depth == 0.0) throw InvalidInput("cannot convert the zero vector");
  SphericalPoint out;
  out.depth = depth;
  out.direction.elevation = std::atan2(p.z, horizontal);
  out.direction.azimuth = horizontal == 0.0 ? 0.0 : std::atan2(p.y, p.x);
  return out;
}

}  // namespace radarsplat
