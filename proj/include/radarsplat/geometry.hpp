#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace radarsplat {

// Sensor frame: x forward, y left, z up. Azimuth is measured from +x towards
// +y, elevation from the x-y plane towards +z. All angles are radians.

struct AngularCoordinate {
  double azimuth = 0.0;
  double elevation = 0.0;

  bool operator==(const AngularCoordinate&) const = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  bool operator==(const Point3&) const = default;
};

struct AngularRange {
  double azimuth_min = 0.0;
  double azimuth_max = 0.0;
  double elevation_min = 0.0;
  double elevation_max = 0.0;

  static AngularRange from_degrees(double az_min, double az_max, double el_min,
                                   double el_max);

  bool contains(const AngularCoordinate& x) const;
  AngularCoordinate center() const;
  double azimuth_span() const { return azimuth_max - azimuth_min; }
  double elevation_span() const { return elevation_max - elevation_min; }

  bool operator==(const AngularRange&) const = default;
};

/// Azimuth [-90, 90] deg by elevation [-20, 20] deg.
AngularRange default_radar_range();

struct SphericalPoint {
  AngularCoordinate direction;
  double depth = 0.0;
};

// Products are formed in long double so that whole degrees map to the
// correctly rounded radian value (90 -> pi/2, 180 -> pi).
constexpr double deg_to_rad(long double deg) {
  return static_cast<double>(deg * (std::numbers::pi_v<long double> / 180.0L));
}
constexpr double rad_to_deg(double rad) {
  return static_cast<double>(rad * (180.0L / std::numbers::pi_v<long double>));
}

/// Shortest decimal degree string s with parse_degrees(s) == rad bit for bit.
/// Some radian doubles have no double-valued degree preimage at all, hence a
/// string rather than rad_to_deg().
std::string format_degrees(double rad);

/// Decimal degrees to radians without an intermediate rounding to double.
/// nullopt unless the whole (trimmed) field is a number.
std::optional<double> parse_degrees(std::string_view text);

/// Throws InvalidInput on NaN/Inf or out-of-range angles.
void validate(const AngularCoordinate& x);
/// Throws InvalidInput unless min < max on both axes and bounds are valid angles.
void validate(const AngularRange& r);

/// Throws InvalidInput when depth is not a finite positive number.
Point3 spherical_to_cartesian(const AngularCoordinate& direction, double depth);

/// Throws InvalidInput for the zero vector or non-finite input. At the poles the
/// azimuth is reported as 0.
SphericalPoint cartesian_to_spherical(const Point3& p);

}  // namespace radarsplat
