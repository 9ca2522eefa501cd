#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <doctest.h>

#include "radarsplat/errors.hpp"
#include "radarsplat/geometry.hpp"

using namespace radarsplat;
using std::numbers::pi;

TEST_SUITE("geometry") {

TEST_CASE("spherical_to_cartesian on the axes") {
  const Point3 a = spherical_to_cartesian({0.0, 0.0}, 1.0);
  CHECK(a.x == 1.0);
  CHECK(a.y == 0.0);
  CHECK(a.z == 0.0);

  const Point3 b = spherical_to_cartesian({pi / 2, 0.0}, 2.0);
  CHECK(std::abs(b.x) < 1e-15);
  CHECK(b.y == 2.0);
  CHECK(b.z == 0.0);
}

TEST_CASE("spherical_to_cartesian matches the closed form at (pi/4, pi/6, 10)") {
  // 10 cos(pi/6) cos(pi/4) = 10 * sqrt(3)/2 * sqrt(2)/2 = 5 sqrt(6)/2
  const double xy = 5.0 * std::sqrt(6.0) / 2.0;
  const Point3 p = spherical_to_cartesian({pi / 4, pi / 6}, 10.0);
  CHECK(std::abs(p.x - 6.123724356957945) < 1e-12);
  CHECK(std::abs(p.x - xy) < 1e-12);
  CHECK(std::abs(p.y - xy) < 1e-12);
  CHECK(std::abs(p.z - 5.0) < 1e-12);
}

TEST_CASE("spherical_to_cartesian rejects bad depth") {
  CHECK_THROWS_AS(spherical_to_cartesian({0, 0}, 0.0), InvalidInput);
  CHECK_THROWS_AS(spherical_to_cartesian({0, 0}, -1.0), InvalidInput);
  CHECK_THROWS_AS(spherical_to_cartesian({0, 0}, std::numeric_limits<double>::quiet_NaN()),
                  InvalidInput);
  CHECK_THROWS_AS(spherical_to_cartesian({0, 0}, std::numeric_limits<double>::infinity()),
                  InvalidInput);
  CHECK_THROWS_AS(spherical_to_cartesian({4.0, 0}, 1.0), InvalidInput);
  CHECK_THROWS_AS(spherical_to_cartesian({0, 2.0}, 1.0), InvalidInput);
}

TEST_CASE("cartesian_to_spherical basics and pole convention") {
  const SphericalPoint a = cartesian_to_spherical({1, 0, 0});
  CHECK(a.direction.azimuth == 0.0);
  CHECK(a.direction.elevation == 0.0);
  CHECK(a.depth == 1.0);

  const SphericalPoint pole = cartesian_to_spherical({0, 0, 3});
  CHECK(pole.direction.azimuth == 0.0);
  CHECK(pole.direction.elevation == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(pole.depth == 3.0);

  const SphericalPoint south = cartesian_to_spherical({0, 0, -2});
  CHECK(south.direction.azimuth == 0.0);
  CHECK(south.direction.elevation == doctest::Approx(-pi / 2).epsilon(1e-15));

  CHECK_THROWS_AS(cartesian_to_spherical({0, 0, 0}), InvalidInput);
  CHECK_THROWS_AS(cartesian_to_spherical({std::numeric_limits<double>::quiet_NaN(), 0, 1}),
                  InvalidInput);
}

TEST_CASE("round trip of (0.3, -0.2, 7.5)") {
  const SphericalPoint s = cartesian_to_spherical(spherical_to_cartesian({0.3, -0.2}, 7.5));
  CHECK(std::abs(s.direction.azimuth - 0.3) < 1e-12);
  CHECK(std::abs(s.direction.elevation + 0.2) < 1e-12);
  CHECK(std::abs(s.depth - 7.5) < 1e-12);
}

TEST_CASE("property: round trip and norm preservation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> az(-pi, pi);
  std::uniform_real_distribution<double> el(-pi / 2 + 1e-6, pi / 2 - 1e-6);
  std::uniform_real_distribution<double> logd(std::log(0.1), std::log(1000.0));
  double worst_angle = 0.0;
  double worst_depth = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const AngularCoordinate a{az(rng), el(rng)};
    const double d = std::exp(logd(rng));
    const Point3 p = spherical_to_cartesian(a, d);
    worst_depth = std::max(worst_depth, std::abs(p.norm() - d));
    const SphericalPoint s = cartesian_to_spherical(p);
    worst_depth = std::max(worst_depth, std::abs(s.depth - d));
    worst_angle = std::max({worst_angle, std::abs(s.direction.azimuth - a.azimuth),
                            std::abs(s.direction.elevation - a.elevation)});
  }
  CHECK(worst_angle <= 1e-10);
  CHECK(worst_depth <= 1e-10);
}

TEST_CASE("angular ranges") {
  const AngularRange r = default_radar_range();
  CHECK(r.azimuth_min == deg_to_rad(-90.0));
  CHECK(r.azimuth_max == deg_to_rad(90.0));
  CHECK(r.elevation_min == deg_to_rad(-20.0));
  CHECK(r.elevation_max == deg_to_rad(20.0));
  CHECK(r.contains({r.azimuth_max, r.elevation_min}));
  CHECK_FALSE(r.contains({r.azimuth_max + 1e-9, 0.0}));
  CHECK(r.center() == AngularCoordinate{0.0, 0.0});
  CHECK_NOTHROW(validate(r));
  CHECK_THROWS_AS(validate(AngularRange{0.1, 0.1, -0.1, 0.1}), InvalidInput);
  CHECK_THROWS_AS(validate(AngularRange{0.2, 0.1, -0.1, 0.1}), InvalidInput);
  CHECK_THROWS_AS(validate(AngularRange{-4.0, 0.1, -0.1, 0.1}), InvalidInput);
}

TEST_CASE("degree strings reproduce radians bit for bit") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-pi, pi);
  int exact = 0;
  for (int i = 0; i < 100000; ++i) {
    const double r = u(rng);
    exact += parse_degrees(format_degrees(r)) == r;
  }
  CHECK(exact == 100000);
  for (double r : {0.0, pi, -pi, pi / 2, 1e-300, std::nextafter(pi / 2, 0.0)}) {
    CHECK(parse_degrees(format_degrees(r)) == r);
  }
  CHECK(format_degrees(deg_to_rad(20.0)) == "20");
  CHECK(format_degrees(deg_to_rad(-12.5)) == "-12.5");
  CHECK(deg_to_rad(90.0) == pi / 2);
  CHECK(deg_to_rad(180.0) == pi);
  CHECK(parse_degrees(" 45 ") == deg_to_rad(45.0));
  CHECK_FALSE(parse_degrees("45x").has_value());
  CHECK_FALSE(parse_degrees("").has_value());
}

}  // TEST_SUITE
