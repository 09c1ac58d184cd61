#pragma once

#include <numbers>
#include <stdexcept>

namespace epath {

/// Shared lattice resolution. Internal time runs in units where one fiber
/// period is 4; the lattice spacing is eps = 4 / (2n) on both axes.
struct LatticeSpec {
  int n = 10;
  /// Physical mass m. One fiber period is identified with one Compton period
  /// 2*pi/m, so internal time tau maps to physical time tau * time_unit().
  double mass = 1.0;

  static constexpr double kPeriod = 4.0;
  /// Compton angular frequency in internal units (2*pi / kPeriod).
  static constexpr double kCarrierOmega = std::numbers::pi / 2.0;

  double epsilon() const { return kPeriod / (2.0 * n); }
  double time_unit() const { return kCarrierOmega / mass; }

  void validate() const {
    if (n <= 0) throw std::invalid_argument("n must be positive");
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  }
};

}  // namespace epath
