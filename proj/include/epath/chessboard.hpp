#pragma once
// Feynman chessboard kernel on a 1+1 lattice, computed by exhaustive corner
// enumeration and by a position-resolved transfer operator.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace epath::chessboard {

enum class Direction { Right, Left };
enum class FinalDirection { Right, Left, Any };

using Rational = boost::multiprecision::cpp_rational;

struct ChessboardProblem {
  int n_steps = 1;
  int displacement = 0;  // right steps minus left steps
  double step_size = 0.1;
  double mass = 1.0;
  Direction initial_direction = Direction::Right;
  FinalDirection final_direction = FinalDirection::Any;
  // When set, the first step may oppose initial_direction and doing so counts
  // as a corner. By default the first step is initial_direction itself.
  bool incoming_corner = false;

  /// Throws std::invalid_argument when n_steps < 1, step_size <= 0 or mass < 0.
  void validate() const;
  /// |displacement| <= n_steps and matching parity.
  bool reachable() const;
};

/// R -> N(R). Counts are exact integers.
struct CornerHistogram {
  std::map<int, std::uint64_t> counts;

  std::uint64_t total() const;
  std::uint64_t at(int corners) const;
  bool operator==(const CornerHistogram&) const = default;
};

struct KernelValue {
  double phi_plus = 0.0;
  double phi_minus = 0.0;
};

struct ExactKernelValue {
  Rational phi_plus;
  Rational phi_minus;
  bool operator==(const ExactKernelValue&) const = default;
};

class EnumerationTooLarge : public std::length_error {
 public:
  explicit EnumerationTooLarge(int cap);
  int cap() const { return cap_; }

 private:
  int cap_;
};

class KernelOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

inline constexpr int kDefaultEnumerationCap = 24;

struct EnumerationOptions {
  int cap = kDefaultEnumerationCap;
  int threads = 1;  // 0 = hardware concurrency
};

/// Walks every admissible step sequence and histograms its reversals.
/// Throws EnumerationTooLarge when n_steps exceeds options.cap.
CornerHistogram enumerate_corner_histogram(const ChessboardProblem& problem,
                                           const EnumerationOptions& options = {});

/// Splits sum_R N(R) (i*eps*m)^R into its real and imaginary parts.
/// Throws KernelOverflow if either part is not finite.
KernelValue kernel_corner_sum(const CornerHistogram& hist, double step_size, double mass);
ExactKernelValue kernel_corner_sum_exact(const CornerHistogram& hist, const Rational& eps_m);

KernelValue kernel_transfer_matrix(const ChessboardProblem& problem);
/// Exact Gaussian-rational transfer operator; intended for n_steps <= 14 oracle runs.
ExactKernelValue kernel_transfer_matrix_exact(const ChessboardProblem& problem,
                                              const Rational& eps_m);

struct PhasePoint {
  double t;
  int steps;
  KernelValue value;
};

/// K(0, t) at t = eps, 2*eps, ... <= t_max (odd step counts give zero).
/// Requires eps*m < 1.
std::vector<PhasePoint> kernel_phase_series(double t_max, double step_size, double mass,
                                            Direction initial = Direction::Right,
                                            FinalDirection final_dir = FinalDirection::Any);

/// Converts a decimal double such as 0.05 to the nearest rational with a
/// small denominator (exact for the decimal literals used in tests and configs).
Rational to_rational(double value, std::int64_t max_denominator = 1000000);

}  // namespace epath::chessboard
