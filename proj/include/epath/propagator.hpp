#pragma once
// Free non-relativistic propagator written by frequency-adjusted cables
// swept along rays of constant velocity.

#include <complex>
#include <iosfwd>
#include <vector>

#include "epath/density.hpp"
#include "epath/entwine.hpp"

namespace epath::propagator {

/// exp(-i m t (1 - x^2 / (2 t^2))), unit modulus. Throws for t <= 0.
std::complex<double> analytic_kernel(double x, double t, double mass);

/// Carrier frequency along x = v t in physical units: m (1 - v^2 / 2).
double ray_omega(double v, double mass);

struct RaySpec {
  double v = 0.0;
  double t_start = 1.0;  // internal time units
  double t_end = 41.0;

  /// Internal time dilation of the cable: the carrier period becomes 4 * scale.
  double scale() const { return 1.0 / (1.0 - 0.5 * v * v); }
};

/// A cable stretched by RaySpec::scale() and sheared by v, whose axis
/// passes through the space-time origin and whose steady window covers the
/// ray's time span. Carrier phase is zero at t = 0 for every ray.
EntwinedPath write_ray(const RaySpec& ray, const LatticeSpec& lattice, int amplitude_m);

struct RegionSpec {
  double x_min = -12.0;
  double x_max = 12.0;
  double t_min = 1.0;
  double t_max = 41.0;
  std::vector<double> ray_fan{0.0};
  LatticeSpec lattice{};
};

/// Default fan: v = -0.25 .. 0.25 in steps of 0.05.
std::vector<double> default_ray_fan();

struct RayReport {
  double v = 0.0;
  double fitted_omega = 0.0;    // physical units
  double expected_omega = 0.0;  // m (1 - v^2/2)
  double relative_error = 0.0;
  /// RMS of (adolescent/A - Re K~) and (senescent/A + Im K~) pooled, where
  /// K~ is the analytic kernel on the ray times the fitted constant phase.
  double rms_residual = 0.0;
  double channel_lag = 0.0;     // internal time, from fitted phases
  double expected_lag = 0.0;    // quarter carrier period
  double amplitude = 0.0;       // cell counts
  double amplitude_spread = 0.0;  // |A_first_half - A_second_half| / A
  double phase = 0.0;           // constant phase factor, radians
};

struct RegionResult {
  DensityField field;  // per-ray totals bound to the nearest cell on each ray
  std::vector<RayReport> rays;
};

struct WriteOptions {
  int threads = 1;  // rays run concurrently; 0 = hardware concurrency
};

/// Per-ray time series: total adolescent and senescent counts per time row.
struct RaySeries {
  std::vector<double> t;  // internal time at row centers
  std::vector<double> adolescent;
  std::vector<double> senescent;
};

RaySeries ray_series(const RaySpec& ray, const LatticeSpec& lattice, int amplitude_m);
RayReport analyse_ray(const RaySeries& series, double v, const LatticeSpec& lattice);

RegionResult write_region(const RegionSpec& region, int amplitude_m,
                          const WriteOptions& options = {});

/// Header line, one record per ray, then a "# summary" line.
void write_report(std::ostream& os, const std::vector<RayReport>& rays);

}  // namespace epath::propagator
