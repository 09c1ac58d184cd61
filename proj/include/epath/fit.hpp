#pragma once
// Least-squares sinusoid fitting: y ~ A cos(omega t + phase).

#include <span>

namespace epath::fit {

struct SinusoidFit {
  double amplitude = 0.0;  // >= 0
  double omega = 0.0;
  double phase = 0.0;      // in (-pi, pi]
  double rms_residual = 0.0;
  double relative_rms = 0.0;  // rms_residual / (amplitude / sqrt 2)
};

/// Amplitude and phase at a fixed frequency.
SinusoidFit fit_fixed_frequency(std::span<const double> t, std::span<const double> y, double omega);

/// Frequency searched in [omega_lo, omega_hi]: a periodogram scan, then a
/// golden-section refinement of the residual around the best scan point.
SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double omega_lo,
                         double omega_hi);

}  // namespace epath::fit
