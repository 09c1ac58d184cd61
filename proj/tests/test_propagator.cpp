#include <doctest.h>

#include <cmath>
#include <sstream>

#include "epath/propagator.hpp"

using namespace epath;
using namespace epath::propagator;

TEST_CASE("analytic kernel has unit modulus and the expected phase") {
  const auto k = analytic_kernel(0.0, 2.0, 1.5);
  CHECK(std::abs(k) == doctest::Approx(1.0));
  CHECK(std::arg(k) == doctest::Approx(std::remainder(-3.0, 2 * M_PI)));
  const auto off = analytic_kernel(1.0, 2.0, 1.0);  // phase -(2 - 1/4)
  CHECK(std::arg(off) == doctest::Approx(-1.75));
  CHECK_THROWS(analytic_kernel(0.0, 0.0, 1.0));
}

TEST_CASE("ray frequency law") {
  CHECK(ray_omega(0.0, 2.0) == 2.0);
  CHECK(ray_omega(0.2, 1.0) == doctest::Approx(0.98));
  CHECK(RaySpec{0.2}.scale() == doctest::Approx(1.0 / 0.98));
  const auto fan = default_ray_fan();
  REQUIRE(fan.size() == 11);
  CHECK(fan.front() == doctest::Approx(-0.25));
  CHECK(fan[5] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(fan.back() == doctest::Approx(0.25));
}

TEST_CASE("ray path drifts with the ray and covers its span") {
  const LatticeSpec lattice{10, 1.0};
  const RaySpec ray{0.2, 1.0, 21.0};
  const auto path = write_ray(ray, lattice, 10);
  CHECK(path.steady_window().begin <= ray.t_start);
  CHECK(path.steady_window().end >= ray.t_end);
  for (const auto& f : path.fibers()) {
    CHECK(f.drift == 0.2);
    CHECK(f.origin.x == doctest::Approx(0.2 * f.origin.t).epsilon(1e-9));
  }
  CHECK_THROWS_AS(write_ray(RaySpec{1.0}, lattice, 10), SuperluminalDrift);
}

TEST_CASE("ray carrier frequency and channel lag") {
  const LatticeSpec lattice{20, 1.0};
  for (double v : {-0.25, 0.0, 0.15}) {
    CAPTURE(v);
    const RaySpec ray{v, 1.0, 41.0};
    const auto report = analyse_ray(ray_series(ray, lattice, 20), v, lattice);
    CHECK(report.expected_omega == doctest::Approx(ray_omega(v, 1.0)));
    CHECK(report.relative_error < 0.01);
    CHECK(report.channel_lag == doctest::Approx(report.expected_lag).epsilon(0.02));
    CHECK(report.amplitude_spread < 0.05);
    CHECK(report.rms_residual < 0.1);
  }
}

TEST_CASE("region output is deterministic across worker counts") {
  RegionSpec region;
  region.lattice = {10, 1.0};
  region.t_max = 21.0;
  region.ray_fan = {-0.2, 0.0, 0.1};
  const auto one = write_region(region, 10, {1});
  const auto many = write_region(region, 10, {8});
  CHECK(one.field == many.field);
  REQUIRE(one.rays.size() == 3);
  std::ostringstream a, b;
  write_report(a, one.rays);
  write_report(b, many.rays);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("v,fitted_omega,", 0) == 0);
  CHECK(a.str().find("# summary rays=3") != std::string::npos);
  CHECK(one.field.total(Channel::Adolescent) != 0);
}

TEST_CASE("region rejects superluminal rays") {
  RegionSpec region;
  region.ray_fan = {0.5, 1.2};
  CHECK_THROWS_AS(write_region(region, 5), SuperluminalDrift);
}
