#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "epath/fit.hpp"

using namespace epath::fit;

namespace {

struct Samples {
  std::vector<double> t, y;
};

Samples cosine(double a, double w, double phi, double noise = 0.0, int n = 400) {
  Samples s;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, noise > 0 ? noise : 1.0);
  for (int i = 0; i < n; ++i) {
    const double t = 0.05 * i;
    s.t.push_back(t);
    s.y.push_back(a * std::cos(w * t + phi) + (noise > 0 ? g(rng) : 0.0));
  }
  return s;
}

}  // namespace

TEST_CASE("fixed-frequency fit is exact on a clean cosine") {
  const auto s = cosine(3.0, 1.3, 0.7);
  const auto f = fit_fixed_frequency(s.t, s.y, 1.3);
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.phase == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.rms_residual < 1e-10);
}

TEST_CASE("negative amplitudes fold into the phase") {
  const auto s = cosine(-2.0, 1.0, 0.0);
  const auto f = fit_fixed_frequency(s.t, s.y, 1.0);
  CHECK(f.amplitude == doctest::Approx(2.0));
  CHECK(std::abs(f.phase) == doctest::Approx(M_PI));
}

TEST_CASE("free-frequency fit finds the carrier") {
  const auto s = cosine(5.0, M_PI / 2, -1.1);
  const auto f = fit_sinusoid(s.t, s.y, 0.5 * M_PI / 2, 1.5 * M_PI / 2);
  CHECK(f.omega == doctest::Approx(M_PI / 2).epsilon(1e-7));
  CHECK(f.phase == doctest::Approx(-1.1).epsilon(1e-5));
  CHECK(f.relative_rms < 1e-6);
}

TEST_CASE("noisy fit stays close and reports the noise level") {
  const auto s = cosine(1.0, 2.0, 0.3, 0.1, 2000);
  const auto f = fit_sinusoid(s.t, s.y, 1.0, 3.0);
  CHECK(f.omega == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(f.rms_residual == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("degenerate inputs are rejected") {
  const std::vector<double> t{0.0}, y{1.0};
  CHECK_THROWS(fit_sinusoid(t, y, 1.0, 2.0));
  const auto s = cosine(1.0, 1.0, 0.0);
  CHECK_THROWS(fit_sinusoid(s.t, s.y, 2.0, 1.0));
}
