#include "epath/fit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "epath/simd.hpp"

namespace epath::fit {

namespace {

struct Basis {
  std::vector<double> c, s;
  double explained = 0.0;  // a*yc + b*ys of the last solve
};

// Residuals from the normal equations unless `direct` is set.
SinusoidFit solve(std::span<const double> t, std::span<const double> y, double omega,
                  Basis& basis, bool direct = false) {
  const std::size_t n = t.size();
  basis.c.resize(n);
  basis.s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    basis.c[i] = std::cos(omega * t[i]);
    basis.s[i] = std::sin(omega * t[i]);
  }
  const double cc = simd::dot(basis.c, basis.c);
  const double ss = simd::dot(basis.s, basis.s);
  const double cs = simd::dot(basis.c, basis.s);
  const double yc = simd::dot(y, basis.c);
  const double ys = simd::dot(y, basis.s);
  const double yy = simd::dot(y, y);
  const double det = cc * ss - cs * cs;

  SinusoidFit fit;
  fit.omega = omega;
  double a = 0.0, b = 0.0;  // y ~ a cos + b sin
  if (std::abs(det) > 1e-12 * (cc * ss + 1e-300)) {
    a = (yc * ss - ys * cs) / det;
    b = (ys * cc - yc * cs) / det;
  }
  // A cos(wt + phi) = A cos(phi) cos(wt) - A sin(phi) sin(wt)
  fit.amplitude = std::hypot(a, b);
  fit.phase = std::atan2(-b, a);
  basis.explained = a * yc + b * ys;
  double residual_ss = std::max(0.0, yy - basis.explained);
  if (direct) {
    residual_ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (a * basis.c[i] + b * basis.s[i]);
      residual_ss += r * r;
    }
  }
  fit.rms_residual = std::sqrt(residual_ss / static_cast<double>(n));
  fit.relative_rms =
      fit.amplitude > 0.0 ? fit.rms_residual / (fit.amplitude / std::numbers::sqrt2) : INFINITY;
  return fit;
}

void check(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("fit: t and y lengths differ");
  if (t.size() < 3) throw std::invalid_argument("fit: need at least three samples");
}

}  // namespace

SinusoidFit fit_fixed_frequency(std::span<const double> t, std::span<const double> y, double omega) {
  check(t, y);
  Basis basis;
  return solve(t, y, omega, basis, true);
}

SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double omega_lo,
                         double omega_hi) {
  check(t, y);
  if (!(omega_hi > omega_lo) || !(omega_lo > 0.0)) {
    throw std::invalid_argument("fit: need 0 < omega_lo < omega_hi");
  }
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw std::invalid_argument("fit: samples must span positive time");

  Basis basis;
  auto cost = [&](double w) {
    solve(t, y, w, basis);
    return -basis.explained;
  };
  // Eight scan points per periodogram peak width (2 pi / span).
  const double step = 2.0 * std::numbers::pi / span / 8.0;
  const int scan = std::max(16, static_cast<int>(std::ceil((omega_hi - omega_lo) / step)));
  double best_omega = omega_lo;
  double best_cost = INFINITY;
  for (int i = 0; i <= scan; ++i) {
    const double w = omega_lo + (omega_hi - omega_lo) * i / scan;
    const double r = cost(w);
    if (r < best_cost) {
      best_cost = r;
      best_omega = w;
    }
  }

  const double h = (omega_hi - omega_lo) / scan;
  double lo = std::max(omega_lo, best_omega - h);
  double hi = std::min(omega_hi, best_omega + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = cost(x1);
  double f2 = cost(x2);
  for (int iter = 0; iter < 80 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = cost(x2);
    }
  }
  return solve(t, y, 0.5 * (lo + hi), basis, true);
}

}  // namespace epath::fit
