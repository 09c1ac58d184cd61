#pragma once
// Particle on a ring: two counter-propagating velocity eigenpaths written on
// a periodic domain, and the spatial-mode analysis of the resulting density.

#include <iosfwd>
#include <stdexcept>

#include "epath/density.hpp"

namespace epath::ring {

class RelativisticEigenSpeed : public std::domain_error {
 public:
  RelativisticEigenSpeed()
      : std::domain_error("relativistic eigen speed; increase L or m") {}
};

/// v_k = 2 pi k / (m L): momentum m v = 2 pi k / L closes the phase around
/// the ring. Equivalent to sqrt(2 E_k / m) with E_k = (2 pi k)^2 / (2 m L^2).
double eigen_speed(int k, double mass, double circumference);

struct RingSpec {
  double circumference = 8.0;  // internal length units, multiple of eps
  int mode = 1;
  double v = 0.5;
  int cycles = 10;             // carrier periods written
  int write_origin = 0;        // lane origin offset in cells
};

/// Eigen speed for spec.mode with the circumference converted to physical units.
double ring_eigen_speed(const RingSpec& spec, const LatticeSpec& lattice);

struct RunOptions {
  int threads = 1;  // 0 = hardware concurrency
};

/// One lane per cell for each drift direction. Lane x0 starts with carrier
/// phase +-p x0 (p = m v), the -v family one quarter period behind. Each
/// lane's per-slab totals are bound to the cell on its axis, wrapped mod L.
DensityField run_ring(const RingSpec& spec, const LatticeSpec& lattice, int amplitude_m,
                      const RunOptions& options = {});

/// Carrier period along a ring eigenpath in internal time.
double carrier_period(double v);

struct StandingWaveMetrics {
  int dominant_mode = 0;
  double phase_drift = 0.0;  // cells per carrier period
  double mode_purity = 0.0;
};

/// Per time row, the spatial DFT of the adolescent channel. The dominant
/// mode maximises time-averaged power; its phase is tracked modulo pi (a
/// standing wave flips sign) and fitted linearly against time with power
/// weights. Throws std::invalid_argument for an all-zero field.
StandingWaveMetrics standing_wave_metrics(const DensityField& field, double period = 4.0);

/// dominant_mode,phase_drift,mode_purity header and one record.
void write_metrics(std::ostream& os, const StandingWaveMetrics& m);

}  // namespace epath::ring
