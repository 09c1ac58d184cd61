#include "epath/propagator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "epath/fit.hpp"
#include "epath/io.hpp"

namespace epath::propagator {

std::complex<double> analytic_kernel(double x, double t, double mass) {
  if (!(t > 0.0)) throw std::invalid_argument("analytic kernel needs t > 0");
  const double phase = -mass * t * (1.0 - x * x / (2.0 * t * t));
  return std::polar(1.0, phase);
}

double ray_omega(double v, double mass) { return mass * (1.0 - 0.5 * v * v); }

std::vector<double> default_ray_fan() {
  std::vector<double> fan;
  for (int i = -5; i <= 5; ++i) fan.push_back(0.05 * i);
  return fan;
}

EntwinedPath write_ray(const RaySpec& ray, const LatticeSpec& lattice, int amplitude_m) {
  lattice.validate();
  if (!(std::abs(ray.v) < 1.0)) throw SuperluminalDrift();
  if (!(ray.t_start > 0.0) || !(ray.t_end > ray.t_start)) {
    throw std::invalid_argument("ray time span must satisfy 0 < t_start < t_end");
  }
  const double s = ray.scale();
  const double eps = lattice.epsilon();
  const double period = LatticeSpec::kPeriod * s;
  // Steady state starts at most (n-1)eps + 3 + eps scaled periods after the origin.
  const double lead = s * ((lattice.n - 1) * eps + 3.0 + eps);
  const double cycles_before = std::ceil((lead - ray.t_start) / period);
  const double t_origin = -period * cycles_before;
  const int periods = static_cast<int>(std::ceil((ray.t_end - t_origin) / period)) + 1;
  CableOptions options;
  options.periods = periods;
  options.drift = ray.v;
  options.scale = s;
  return build_cable({ray.v * t_origin, t_origin}, lattice, amplitude_m, options);
}

RaySeries ray_series(const RaySpec& ray, const LatticeSpec& lattice, int amplitude_m) {
  const EntwinedPath path = write_ray(ray, lattice, amplitude_m);
  const double eps = lattice.epsilon();
  const double k_begin = std::floor(ray.t_start / eps);
  const double k_end = std::ceil(ray.t_end / eps);
  const auto profile =
      accumulate_time_profile(path, k_begin * eps, static_cast<int>(k_end - k_begin), eps);

  RaySeries series;
  for (std::size_t k = 0; k < profile.adolescent.size(); ++k) {
    const double tc = (k_begin + static_cast<double>(k) + 0.5) * eps;
    if (tc < ray.t_start || tc > ray.t_end) continue;
    series.t.push_back(tc);
    series.adolescent.push_back(static_cast<double>(profile.adolescent[k]));
    series.senescent.push_back(static_cast<double>(profile.senescent[k]));
  }
  return series;
}

namespace {

double wrap_positive(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

}  // namespace

RayReport analyse_ray(const RaySeries& series, double v, const LatticeSpec& lattice) {
  const double omega_int = LatticeSpec::kCarrierOmega * (1.0 - 0.5 * v * v);
  const double unit = lattice.time_unit();

  RayReport r;
  r.v = v;
  r.expected_omega = ray_omega(v, lattice.mass);
  const auto free_fit = fit::fit_sinusoid(series.t, series.adolescent, 0.8 * omega_int, 1.2 * omega_int);
  r.fitted_omega = free_fit.omega / unit;
  r.relative_error = std::abs(r.fitted_omega - r.expected_omega) / r.expected_omega;

  const auto adol = fit::fit_fixed_frequency(series.t, series.adolescent, omega_int);
  const auto sen = fit::fit_fixed_frequency(series.t, series.senescent, omega_int);
  r.amplitude = adol.amplitude;
  r.phase = adol.phase;
  r.channel_lag = wrap_positive(adol.phase - sen.phase) / omega_int;
  r.expected_lag = 0.25 * 2.0 * std::numbers::pi / omega_int;

  double sq = 0.0;
  const std::complex<double> phase_factor = std::polar(1.0, -adol.phase);
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double t_phys = series.t[i] * unit;
    const std::complex<double> k =
        analytic_kernel(v * t_phys, t_phys, lattice.mass) * phase_factor;
    const double da = series.adolescent[i] / adol.amplitude - k.real();
    const double ds = series.senescent[i] / adol.amplitude + k.imag();
    sq += da * da + ds * ds;
  }
  r.rms_residual = std::sqrt(sq / (2.0 * static_cast<double>(series.t.size())));

  const std::size_t half = series.t.size() / 2;
  const std::span<const double> t(series.t), y(series.adolescent);
  const auto first = fit::fit_fixed_frequency(t.first(half), y.first(half), omega_int);
  const auto second = fit::fit_fixed_frequency(t.subspan(half), y.subspan(half), omega_int);
  r.amplitude_spread = std::abs(first.amplitude - second.amplitude) / adol.amplitude;
  return r;
}

RegionResult write_region(const RegionSpec& region, int amplitude_m, const WriteOptions& options) {
  region.lattice.validate();
  if (region.ray_fan.empty()) throw std::invalid_argument("ray fan must not be empty");
  if (!(region.t_min > 0.0)) throw std::invalid_argument("region t_min must be positive");
  if (!(region.x_max > region.x_min) || !(region.t_max > region.t_min)) {
    throw std::invalid_argument("region ranges must be non-empty");
  }
  const std::size_t rays = region.ray_fan.size();
  std::vector<RaySeries> series(rays);
  std::vector<RayReport> reports(rays);
  std::vector<std::exception_ptr> errors(rays);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rays; i = next++) {
      try {
        const RaySpec ray{region.ray_fan[i], region.t_min, region.t_max};
        series[i] = ray_series(ray, region.lattice, amplitude_m);
        reports[i] = analyse_ray(series[i], ray.v, region.lattice);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(
      1, std::min(static_cast<int>(rays),
                  options.threads > 0
                      ? options.threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double eps = region.lattice.epsilon();
  DensityField field =
      DensityField::covering(region.x_min, region.x_max, region.t_min, region.t_max, eps);
  for (std::size_t i = 0; i < rays; ++i) {
    const double v = region.ray_fan[i];
    const RaySeries& s = series[i];
    for (std::size_t j = 0; j < s.t.size(); ++j) {
      const double row = std::round((s.t[j] - field.origin().t) / eps - 0.5);
      const double col = std::floor((v * s.t[j] - field.origin().x) / eps);
      if (row < 0 || row >= field.t_cells() || col < 0 || col >= field.x_cells()) continue;
      const int r = static_cast<int>(row), c = static_cast<int>(col);
      field.at(Channel::Adolescent, c, r) += static_cast<std::int32_t>(s.adolescent[j]);
      field.at(Channel::Senescent, c, r) += static_cast<std::int32_t>(s.senescent[j]);
    }
  }
  return {std::move(field), std::move(reports)};
}

void write_report(std::ostream& os, const std::vector<RayReport>& rays) {
  using io::format_real;
  os << "v,fitted_omega,expected_omega,relative_error,rms_residual,channel_lag,expected_lag,"
        "amplitude,amplitude_spread,phase\n";
  double max_err = 0.0, max_rms = 0.0;
  for (const auto& r : rays) {
    os << format_real(r.v) << ',' << format_real(r.fitted_omega) << ','
       << format_real(r.expected_omega) << ',' << format_real(r.relative_error) << ','
       << format_real(r.rms_residual) << ',' << format_real(r.channel_lag) << ','
       << format_real(r.expected_lag) << ',' << format_real(r.amplitude) << ','
       << format_real(r.amplitude_spread) << ',' << format_real(r.phase) << '\n';
    max_err = std::max(max_err, r.relative_error);
    max_rms = std::max(max_rms, r.rms_residual);
  }
  os << "# summary rays=" << rays.size() << " max_relative_error=" << format_real(max_err)
     << " max_rms_residual=" << format_real(max_rms) << '\n';
}

}  // namespace epath::propagator
